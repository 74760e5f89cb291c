#include "pbimpact/aggregation.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "pbimpact/errors.hpp"

namespace pbimpact {

namespace {

void require_approval(const Instance& instance) {
  if (instance.vote_type() != VoteType::Approval)
    throw Error(ErrorCode::NonApprovalUnsupported,
                "equal shares needs approval ballots, got " + std::string(to_string(instance.vote_type())));
}

Outcome empty_outcome(const Instance& instance, RuleId rule) {
  Outcome out;
  out.rule = rule;
  out.total_cost = 0;
  out.leftover = instance.budget();
  out.instance_fingerprint = instance_fingerprint(instance);
  return out;
}

void add_winner(const Instance& instance, Outcome& out, std::size_t project) {
  const auto& p = instance.projects()[project];
  out.winners.push_back(p.id);
  out.total_cost += p.cost;
  out.leftover = instance.budget() - out.total_cost;
}

// MES-selectable projects can be bought only through their approvers.
bool has_affordable_remainder(const Instance& instance, const Outcome& out) {
  const auto chosen = out.winner_set();
  for (std::size_t i = 0; i < instance.projects().size(); ++i) {
    const auto& p = instance.projects()[i];
    if (!instance.approvers()[i].empty() && !chosen.count(p.id) && p.cost <= out.leftover) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(RuleId rule) {
  switch (rule) {
    case RuleId::Greedy: return "greedy";
    case RuleId::MesCore: return "mes_core";
    case RuleId::MesAdd1: return "mes_add1";
    case RuleId::MesAdd1u: return "mes_add1u";
  }
  return "greedy";
}

std::optional<RuleId> rule_from_string(std::string_view name) {
  if (name == "greedy" || name == "ug" || name == "UG") return RuleId::Greedy;
  if (name == "mes_core" || name == "core") return RuleId::MesCore;
  if (name == "mes_add1" || name == "add1") return RuleId::MesAdd1;
  if (name == "mes_add1u" || name == "add1u" || name == "es" || name == "ES" || name == "equal_shares")
    return RuleId::MesAdd1u;
  return std::nullopt;
}

bool is_equal_shares(RuleId rule) { return rule != RuleId::Greedy; }

std::string_view rule_role(RuleId rule) { return is_equal_shares(rule) ? "equal_shares" : "greedy"; }

bool Outcome::contains(std::string_view project_id) const {
  return std::find(winners.begin(), winners.end(), project_id) != winners.end();
}

std::string instance_fingerprint(const Instance& instance) {
  std::string key = to_fraction_string(instance.budget()) + "|" + std::to_string(instance.ballots().size());
  for (const auto& p : instance.projects()) key += "|" + p.id + ":" + to_fraction_string(p.cost);
  std::ostringstream os;
  os << std::hex << std::hash<std::string>{}(key);
  return os.str();
}

Outcome make_outcome(const Instance& instance, RuleId rule, std::vector<std::string> winners) {
  Outcome out = empty_outcome(instance, rule);
  for (const auto& id : winners) {
    const auto idx = instance.find_project(id);
    if (!idx) throw Error(ErrorCode::UnknownProjectRef, "unknown winner " + id);
    if (out.contains(id)) throw Error(ErrorCode::InvalidInstance, "winner " + id + " listed twice");
    add_winner(instance, out, *idx);
  }
  return out;
}

std::vector<std::size_t> greedy_order(const Instance& instance) {
  const auto& pop = instance.popularity_vector();
  const auto& projects = instance.projects();
  std::vector<std::size_t> order(projects.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pop[a] != pop[b]) return pop[a] > pop[b];
    if (projects[a].cost != projects[b].cost) return projects[a].cost < projects[b].cost;
    return IdLess{}(projects[a].id, projects[b].id);
  });
  return order;
}

Outcome utilitarian_greedy(const Instance& instance) {
  Outcome out = empty_outcome(instance, RuleId::Greedy);
  const auto& pop = instance.popularity_vector();
  for (const auto idx : greedy_order(instance)) {
    if (pop[idx] <= 0) continue;
    if (instance.projects()[idx].cost <= out.leftover) add_winner(instance, out, idx);
  }
  return out;
}

std::optional<Rational> price_per_supporter(std::vector<Rational> budgets, const Rational& cost) {
  std::sort(budgets.begin(), budgets.end());
  Rational remaining = cost;
  std::size_t payers = budgets.size();
  for (const auto& b : budgets) {
    if (b * payers >= remaining) {
      Rational rho = remaining / payers;
      rho.canonicalize();
      return rho;
    }
    remaining -= b;
    --payers;
  }
  return std::nullopt;
}

Outcome equal_shares_core(const Instance& instance, const Rational& endowment) {
  require_approval(instance);
  if (endowment < 0) throw Error(ErrorCode::InvalidInstance, "negative endowment");

  Outcome out = empty_outcome(instance, RuleId::MesCore);
  out.endowment_used = endowment;

  const auto& projects = instance.projects();
  const auto& approvers = instance.approvers();
  std::vector<Rational> budget(instance.ballots().size(), endowment);

  // Budgets only shrink, so a project's price never drops below the last one
  // computed for it; that lower bound lets each round stop scanning early.
  std::vector<std::size_t> candidates;
  std::vector<Rational> lower_bound(projects.size());
  for (std::size_t i = 0; i < projects.size(); ++i) {
    if (approvers[i].empty()) continue;
    candidates.push_back(i);
    lower_bound[i] = projects[i].cost / Rational(approvers[i].size());
  }

  std::vector<Rational> supporter_budgets;
  while (!candidates.empty()) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return lower_bound[a] < lower_bound[b]; });

    std::optional<std::size_t> best;
    Rational best_rho;
    std::vector<std::size_t> unaffordable;
    for (const auto idx : candidates) {
      if (best && lower_bound[idx] > best_rho) break;
      supporter_budgets.clear();
      for (const auto v : approvers[idx]) supporter_budgets.push_back(budget[v]);
      const auto rho = price_per_supporter(supporter_budgets, projects[idx].cost);
      if (!rho) {
        unaffordable.push_back(idx);
        continue;
      }
      lower_bound[idx] = *rho;
      const bool better = !best || *rho < best_rho ||
                          (*rho == best_rho && (approvers[idx].size() > approvers[*best].size() ||
                                                (approvers[idx].size() == approvers[*best].size() &&
                                                 IdLess{}(projects[idx].id, projects[*best].id))));
      if (better) {
        best = idx;
        best_rho = *rho;
      }
    }
    std::erase_if(candidates, [&](std::size_t idx) {
      return std::find(unaffordable.begin(), unaffordable.end(), idx) != unaffordable.end() ||
             (best && idx == *best);
    });
    if (!best) break;

    const auto& chosen = projects[*best];
    for (const auto v : approvers[*best]) {
      const Rational pay = std::min(budget[v], best_rho);
      if (pay == 0) continue;
      budget[v] -= pay;
      out.payments[instance.ballots()[v].voter_id][chosen.id] = pay;
    }
    add_winner(instance, out, *best);
  }
  return out;
}

Outcome equal_shares_add1(const Instance& instance, const Rational& increment) {
  require_approval(instance);
  if (increment <= 0) throw Error(ErrorCode::InvalidInstance, "increment must be positive");
  if (instance.ballots().empty()) throw Error(ErrorCode::NoVoters, "equal shares needs at least one voter");

  Rational endowment = instance.budget() / Rational(instance.ballots().size());
  endowment.canonicalize();
  Outcome best = equal_shares_core(instance, endowment);

  while (has_affordable_remainder(instance, best)) {
    endowment += increment;
    if (endowment > instance.budget()) break;
    Outcome next = equal_shares_core(instance, endowment);
    if (next.total_cost > instance.budget()) break;
    best = std::move(next);
  }
  best.rule = RuleId::MesAdd1;
  return best;
}

Outcome equal_shares_add1u(const Instance& instance, const Rational& increment) {
  Outcome out = equal_shares_add1(instance, increment);
  out.rule = RuleId::MesAdd1u;
  const auto& pop = instance.popularity_vector();
  for (const auto idx : greedy_order(instance)) {
    const auto& p = instance.projects()[idx];
    if (pop[idx] <= 0 || out.contains(p.id)) continue;
    if (p.cost <= out.leftover) {
      add_winner(instance, out, idx);
      out.completion_payments[p.id] = p.cost;
    }
  }
  return out;
}

Outcome compute_outcome(const Instance& instance, RuleId rule, const Rational& increment) {
  switch (rule) {
    case RuleId::Greedy:
      return utilitarian_greedy(instance);
    case RuleId::MesCore: {
      require_approval(instance);
      if (instance.ballots().empty()) throw Error(ErrorCode::NoVoters, "equal shares needs at least one voter");
      return equal_shares_core(instance, instance.budget() / Rational(instance.ballots().size()));
    }
    case RuleId::MesAdd1:
      return equal_shares_add1(instance, increment);
    case RuleId::MesAdd1u:
      return equal_shares_add1u(instance, increment);
  }
  throw Error(ErrorCode::InvalidKey, "unknown rule");
}

ExclusivePair exclusive_winners(const Outcome& a, const Outcome& b) {
  if (a.instance_fingerprint != b.instance_fingerprint)
    throw Error(ErrorCode::InstanceMismatch, "outcomes come from different instances");
  ExclusivePair pair;
  const auto wa = a.winner_set();
  const auto wb = b.winner_set();
  std::set_difference(wa.begin(), wa.end(), wb.begin(), wb.end(), std::inserter(pair.only_a, pair.only_a.end()));
  std::set_difference(wb.begin(), wb.end(), wa.begin(), wa.end(), std::inserter(pair.only_b, pair.only_b.end()));
  return pair;
}

}  // namespace pbimpact
