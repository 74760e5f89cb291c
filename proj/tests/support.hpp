#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pbimpact/aggregation.hpp"
#include "pbimpact/election.hpp"

namespace testsupport {

using pbimpact::Ballot;
using pbimpact::ImpactArea;
using pbimpact::Instance;
using pbimpact::Project;
using pbimpact::Rational;
using pbimpact::VoteType;

inline Rational q(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Ballot approval(std::string voter, std::vector<std::string> ids) {
  return Ballot{std::move(voter), std::move(ids), {}};
}

/// Five projects, eleven voters, budget 1000.
inline Instance toy_instance(Rational budget = 1000) {
  using A = ImpactArea;
  std::vector<Project> projects = {
      {"A", 700, {A::Education}, {pbimpact::Beneficiary::Children}, "School renovation"},
      {"B", 400, {A::Welfare, A::Health}, {pbimpact::Beneficiary::Elderly}, "Community clinic"},
      {"C", 250, {A::Health}, {pbimpact::Beneficiary::Adults}, "Health checkups"},
      {"D", 200, {A::Education, A::Health}, {pbimpact::Beneficiary::Youth}, "First aid courses"},
      {"E", 100, {A::Education, A::Welfare}, {pbimpact::Beneficiary::Students}, "Homework club"},
  };
  std::vector<Ballot> ballots = {
      approval("1", {"A", "B"}),      approval("2", {"A", "B", "C"}), approval("3", {"A", "B"}),
      approval("4", {"A", "B", "C"}), approval("5", {"A", "B", "C"}), approval("6", {"A", "B"}),
      approval("7", {"C", "D", "E"}), approval("8", {"D"}),           approval("9", {"D", "E"}),
      approval("10", {"C", "D", "E"}), approval("11", {"A"}),
  };
  return Instance(std::move(budget), std::move(projects), std::move(ballots), VoteType::Approval);
}

/// Two voters, budget 100: X (40) approved by both, W (55) by voter 1, V (55) by voter 2.
inline Instance xwv_instance() {
  std::vector<Project> projects = {{"X", 40, {}, {}, ""}, {"W", 55, {}, {}, ""}, {"V", 55, {}, {}, ""}};
  std::vector<Ballot> ballots = {approval("1", {"X", "W"}), approval("2", {"X", "V"})};
  return Instance(100, std::move(projects), std::move(ballots), VoteType::Approval);
}

struct RandomOptions {
  int max_voters = 8;
  int max_projects = 8;
  bool allow_scores = false;
  bool rich_text = false;
};

/// Small random approval instance with rational costs and budget.
inline Instance random_instance(std::mt19937_64& rng, const RandomOptions& opt = {}) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const int dens[] = {1, 1, 2, 3, 4, 5, 7, 10};

  const int n_projects = uni(1, opt.max_projects);
  const int n_voters = uni(1, opt.max_voters);
  const bool digit_ids = uni(0, 1) == 1;

  std::vector<Project> projects;
  Rational total = 0;
  for (int j = 0; j < n_projects; ++j) {
    Project p;
    p.id = digit_ids ? std::to_string(uni(1, 3) * 10 + j) : std::string(1, static_cast<char>('a' + j)) + "p";
    p.cost = q(uni(1, 300), dens[uni(0, 7)]);
    const auto& all = pbimpact::kNamedAreas;
    const int n_areas = uni(0, 3);
    for (int a = 0; a < n_areas; ++a) p.areas.insert(all[static_cast<std::size_t>(uni(0, 8))]);
    if (opt.rich_text) {
      if (uni(0, 3) == 0) p.areas.insert(ImpactArea::Other);
      const int n_ben = uni(0, 2);
      for (int b = 0; b < n_ben; ++b)
        p.beneficiaries.insert(pbimpact::kNamedBeneficiaries[static_cast<std::size_t>(uni(0, 7))]);
      static const char* names[] = {"", "Park", "Bike lane; north", "The \"big\" library", " padded ", "Café, ülica"};
      p.name = names[uni(0, 5)];
    }
    total += p.cost;
    projects.push_back(std::move(p));
  }

  VoteType type = VoteType::Approval;
  if (opt.allow_scores) {
    const int t = uni(0, 3);
    type = t == 0 ? VoteType::Cumulative : t == 1 ? VoteType::Scoring : t == 2 ? VoteType::Ordinal : VoteType::Approval;
  }

  std::vector<Ballot> ballots;
  for (int v = 0; v < n_voters; ++v) {
    Ballot b;
    b.voter_id = opt.rich_text && uni(0, 1) ? "v" + std::to_string(v) : std::to_string(v + 1);
    std::vector<int> order(static_cast<std::size_t>(n_projects));
    for (int j = 0; j < n_projects; ++j) order[static_cast<std::size_t>(j)] = j;
    std::shuffle(order.begin(), order.end(), rng);
    const int k = uni(1, n_projects);
    for (int j = 0; j < k; ++j) {
      b.approved.push_back(projects[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])].id);
      if (type == VoteType::Cumulative || type == VoteType::Scoring) b.scores.push_back(q(uni(1, 9)));
    }
    ballots.push_back(std::move(b));
  }

  // Budgets range from tight to generous relative to the total cost.
  Rational budget = total * q(uni(1, 12), 10);
  budget.canonicalize();
  return Instance(budget, std::move(projects), std::move(ballots), type);
}

// ---------------------------------------------------------------------------
// Independent reference implementations.

inline bool ref_id_less(const std::string& a, const std::string& b) {
  auto digits = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  const bool da = digits(a), db = digits(b);
  if (da && db) {
    const auto ta = a.substr(std::min(a.find_first_not_of('0'), a.size()));
    const auto tb = b.substr(std::min(b.find_first_not_of('0'), b.size()));
    if (ta.size() != tb.size()) return ta.size() < tb.size();
    if (ta != tb) return ta < tb;
    return a < b;
  }
  if (da != db) return da;
  return a < b;
}

/// Approval count or summed points, tallied straight from the ballots.
inline std::map<std::string, Rational> ref_popularity(const Instance& inst) {
  std::map<std::string, Rational> pop;
  for (const auto& p : inst.projects()) pop[p.id] = 0;
  for (const auto& b : inst.ballots())
    for (std::size_t k = 0; k < b.approved.size(); ++k) pop[b.approved[k]] += b.scores.empty() ? Rational(1) : b.scores[k];
  return pop;
}

/// Sorted-scan greedy: pick in (popularity desc, cost asc, id asc) order while it fits.
inline std::vector<std::string> ref_greedy(const Instance& inst) {
  const auto pop = ref_popularity(inst);
  std::vector<Project> ps = inst.projects();
  std::sort(ps.begin(), ps.end(), [&](const Project& a, const Project& b) {
    const auto& pa = pop.at(a.id);
    const auto& pb = pop.at(b.id);
    if (pa != pb) return pa > pb;
    if (a.cost != b.cost) return a.cost < b.cost;
    return ref_id_less(a.id, b.id);
  });
  std::vector<std::string> out;
  Rational spent = 0;
  for (const auto& p : ps) {
    if (pop.at(p.id) == 0) continue;
    if (spent + p.cost <= inst.budget()) {
      out.push_back(p.id);
      spent += p.cost;
    }
  }
  return out;
}

/// Least rho with sum(min(b_i, rho)) == cost, by trying every "who pays in
/// full" threshold without sorting. nullopt when the budgets fall short.
inline std::optional<Rational> ref_rho(const std::vector<Rational>& budgets, const Rational& cost) {
  Rational sum = 0;
  for (const auto& b : budgets) sum += b;
  if (budgets.empty() || sum < cost) return std::nullopt;
  std::vector<Rational> thresholds = {Rational(0)};
  thresholds.insert(thresholds.end(), budgets.begin(), budgets.end());
  std::optional<Rational> best;
  for (const auto& t : thresholds) {
    Rational paid_full = 0;
    long rest = 0;
    for (const auto& b : budgets) {
      if (b <= t) paid_full += b;
      else ++rest;
    }
    if (rest == 0) continue;
    Rational rho = (cost - paid_full) / Rational(rest);
    rho.canonicalize();
    if (rho < t) continue;
    bool ok = true;
    for (const auto& b : budgets)
      if (b > t && b < rho) ok = false;
    if (!ok) continue;
    Rational check = 0;
    for (const auto& b : budgets) check += std::min(b, rho);
    if (check != cost) continue;
    if (!best || rho < *best) best = rho;
  }
  // Exact fit with everyone paying in full.
  if (!best && sum == cost) {
    Rational mx = 0;
    for (const auto& b : budgets) mx = std::max(mx, b);
    best = mx;
  }
  return best;
}

/// Checks one equal-shares run against its endowment. Returns the first
/// violated property, or an empty string.
inline std::string check_equal_shares(const Instance& inst, const pbimpact::Outcome& out) {
  if (!out.endowment_used) return "missing endowment";
  const Rational e = *out.endowment_used;
  if (out.total_cost > inst.budget()) return "infeasible";

  std::map<std::string, std::set<std::string>> approves;
  for (const auto& b : inst.ballots()) approves[b.voter_id] = {b.approved.begin(), b.approved.end()};

  std::map<std::string, Rational> paid_by_voter;
  std::map<std::string, Rational> paid_for_project;
  for (const auto& [voter, row] : out.payments) {
    if (!approves.count(voter)) return "payment by unknown voter " + voter;
    for (const auto& [pid, amount] : row) {
      if (amount <= 0) return "non-positive payment";
      if (!approves[voter].count(pid)) return "voter " + voter + " pays for unapproved " + pid;
      paid_by_voter[voter] += amount;
      paid_for_project[pid] += amount;
    }
  }
  for (const auto& [voter, total] : paid_by_voter)
    if (total > e) return "voter " + voter + " exceeds endowment";

  Rational total = 0;
  for (const auto& id : out.winners) {
    const auto& p = inst.project(id);
    total += p.cost;
    const bool completion = out.completion_payments.count(id) > 0;
    const Rational paid = completion ? out.completion_payments.at(id) : paid_for_project[id];
    if (completion && paid_for_project.count(id) && paid_for_project[id] != 0) return "double-paid " + id;
    if (paid != p.cost) return "payments for " + id + " do not sum to its cost";
  }
  if (total != out.total_cost) return "total cost mismatch";
  if (out.leftover != inst.budget() - out.total_cost) return "leftover mismatch";

  // Replay rounds: each equal-shares pick must have the least price.
  std::map<std::string, Rational> budget;
  for (const auto& b : inst.ballots()) budget[b.voter_id] = e;
  std::set<std::string> chosen;
  auto supporters = [&](const std::string& pid) {
    std::vector<std::string> vs;
    for (const auto& b : inst.ballots())
      if (approves[b.voter_id].count(pid)) vs.push_back(b.voter_id);
    return vs;
  };
  auto price = [&](const std::string& pid) {
    std::vector<Rational> bs;
    for (const auto& v : supporters(pid)) bs.push_back(budget[v]);
    return ref_rho(bs, inst.project(pid).cost);
  };
  std::size_t round = 0;
  for (; round < out.winners.size(); ++round) {
    const auto& pick = out.winners[round];
    if (out.completion_payments.count(pick)) break;
    const auto rho = price(pick);
    if (!rho) return "pick " + pick + " was not affordable";
    const auto n_pick = supporters(pick).size();
    for (const auto& p : inst.projects()) {
      if (chosen.count(p.id) || p.id == pick) continue;
      const auto other = price(p.id);
      if (!other) continue;
      if (*other < *rho) return "round " + std::to_string(round) + ": " + p.id + " is cheaper than " + pick;
      if (*other == *rho) {
        const auto n_other = supporters(p.id).size();
        if (n_other > n_pick || (n_other == n_pick && ref_id_less(p.id, pick)))
          return "round " + std::to_string(round) + ": tie-break should prefer " + p.id;
      }
    }
    for (const auto& v : supporters(pick)) {
      const Rational expect = std::min(budget[v], *rho);
      Rational got = 0;
      if (out.payments.count(v) && out.payments.at(v).count(pick)) got = out.payments.at(v).at(pick);
      if (got != expect) return "voter " + v + " paid the wrong share for " + pick;
      budget[v] -= expect;
    }
    chosen.insert(pick);
  }
  // The equal-shares phase only ends when nothing is affordable any more.
  for (const auto& p : inst.projects())
    if (!chosen.count(p.id) && price(p.id)) return "stopped while " + p.id + " was still affordable";
  return {};
}

}  // namespace testsupport
