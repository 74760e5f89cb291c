#include "pbimpact/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "pbimpact/errors.hpp"

namespace pbimpact {

std::string_view to_string(Level level) { return level == Level::Outcome ? "outcome" : "ballot"; }

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::Cost: return "cost";
    case Unit::Projects: return "projects";
    case Unit::Popularity: return "popularity";
  }
  return "cost";
}

std::string_view calc_column(Calc calc, Scope scope) {
  if (scope == Scope::WithinNovelty) return "within_novelty";
  if (scope == Scope::BetweenNovelty) return "between_novelty";
  switch (calc) {
    case Calc::Share: return "share";
    case Calc::Representation: return "representation";
    case Calc::Proportionality: return "proportionality";
  }
  return "share";
}

bool MetricKey::valid() const {
  if (level == Level::Ballot && unit == Unit::Popularity) return false;
  if (scope != Scope::Impact && calc != Calc::Share) return false;
  return true;
}

const std::vector<MetricKey>& all_metric_keys() {
  static const std::vector<MetricKey> keys = [] {
    std::vector<MetricKey> out;
    for (auto scope : {Scope::Impact, Scope::WithinNovelty, Scope::BetweenNovelty})
      for (auto level : {Level::Outcome, Level::Ballot})
        for (auto calc : {Calc::Share, Calc::Representation, Calc::Proportionality})
          for (auto unit : {Unit::Cost, Unit::Projects, Unit::Popularity}) {
            MetricKey k{level, calc, unit, scope};
            if (k.valid()) out.push_back(k);
          }
    return out;
  }();
  return keys;
}

MetricValue MetricValue::ratio(Rational numerator, Rational denominator) {
  MetricValue v;
  v.defined = denominator != 0;
  v.numerator = std::move(numerator);
  v.denominator = std::move(denominator);
  return v;
}

Rational MetricValue::value() const {
  if (!defined) return 0;
  Rational r = numerator / denominator;
  r.canonicalize();
  return r;
}

double MetricValue::as_double() const { return defined ? to_double(value()) : 0.0; }

std::string MetricValue::to_string() const {
  auto side = [](const Rational& r) {
    auto s = to_decimal_string(r);
    return s.find('/') == std::string::npos ? s : "(" + s + ")";
  };
  return side(numerator) + "/" + side(denominator);
}

Rational measure(const Instance& instance, const IdSet& ids, Unit unit) {
  if (unit == Unit::Projects) return Rational(static_cast<unsigned long>(ids.size()));
  Rational sum = 0;
  for (const auto& id : ids) {
    const auto idx = instance.find_project(id);
    if (!idx) throw Error(ErrorCode::UnknownProjectRef, "unknown project " + id);
    sum += unit == Unit::Cost ? instance.projects()[*idx].cost : instance.popularity_vector()[*idx];
  }
  return sum;
}

AreaSlice area_slice(const Instance& instance, const Outcome& outcome, const IdSet& exclusive, ImpactArea area,
                     std::optional<std::string_view> voter) {
  AreaSlice s;
  s.area = area;
  s.rule = outcome.rule;
  s.all_winners = outcome.winner_set();
  s.all_exclusive = exclusive;
  for (const auto& p : instance.projects())
    if (p.areas.count(area)) s.proposed_in_area.insert(p.id);
  std::set_intersection(s.proposed_in_area.begin(), s.proposed_in_area.end(), s.all_winners.begin(),
                        s.all_winners.end(), std::inserter(s.winners_in_area, s.winners_in_area.end()));
  std::set_intersection(s.winners_in_area.begin(), s.winners_in_area.end(), exclusive.begin(), exclusive.end(),
                        std::inserter(s.exclusive_in_area, s.exclusive_in_area.end()));

  if (voter) {
    const auto idx = instance.find_voter(*voter);
    if (!idx) throw Error(ErrorCode::UnknownVoter, "unknown voter " + std::string(*voter));
    s.voter = std::string(*voter);
    const auto& approved = instance.ballots()[*idx].approved;
    const IdSet ballot(approved.begin(), approved.end());
    IdSet w, x;
    std::set_intersection(s.winners_in_area.begin(), s.winners_in_area.end(), ballot.begin(), ballot.end(),
                          std::inserter(w, w.end()));
    std::set_intersection(s.exclusive_in_area.begin(), s.exclusive_in_area.end(), ballot.begin(), ballot.end(),
                          std::inserter(x, x.end()));
    s.ballot_winners_in_area = std::move(w);
    s.ballot_exclusive_in_area = std::move(x);
  }
  return s;
}

namespace {

void check_key(const MetricKey& key, const AreaSlice& slice) {
  if (!key.valid()) throw Error(ErrorCode::InvalidKey, "invalid metric key");
  if (key.level == Level::Ballot && !slice.ballot_winners_in_area)
    throw Error(ErrorCode::InvalidKey, "ballot-level key needs a voter slice");
}

const Rational& ratio_for(const ProposalRatios& ratios, Unit unit) {
  switch (unit) {
    case Unit::Cost: return ratios.r_cost;
    case Unit::Projects: return ratios.r_projects;
    case Unit::Popularity: return ratios.r_popularity;
  }
  return ratios.r_cost;
}

}  // namespace

MetricValue impact_value(const MetricKey& key, const AreaSlice& slice, const ProposalRatios& ratios,
                         const Instance& instance) {
  check_key(key, slice);
  if (key.scope != Scope::Impact) throw Error(ErrorCode::InvalidKey, "novelty key passed to impact_value");

  const auto& focus = key.level == Level::Ballot ? *slice.ballot_winners_in_area : slice.winners_in_area;
  const Rational numerator = measure(instance, focus, key.unit);
  switch (key.calc) {
    case Calc::Share:
      return MetricValue::ratio(numerator, measure(instance, slice.all_winners, key.unit));
    case Calc::Representation:
      return MetricValue::ratio(numerator, measure(instance, slice.proposed_in_area, key.unit));
    case Calc::Proportionality: {
      const auto share = MetricValue::ratio(numerator, measure(instance, slice.all_winners, key.unit));
      if (!share.defined) return MetricValue::ratio(0, 0);
      return MetricValue::ratio(share.value(), ratio_for(ratios, key.unit));
    }
  }
  throw Error(ErrorCode::InvalidKey, "unknown calculation");
}

MetricValue novelty_value(const MetricKey& key, const AreaSlice& slice, const Instance& instance) {
  check_key(key, slice);
  if (key.scope == Scope::Impact) throw Error(ErrorCode::InvalidKey, "impact key passed to novelty_value");

  const auto& focus = key.level == Level::Ballot ? *slice.ballot_exclusive_in_area : slice.exclusive_in_area;
  const auto& base = key.scope == Scope::WithinNovelty ? slice.winners_in_area : slice.all_exclusive;
  return MetricValue::ratio(measure(instance, focus, key.unit), measure(instance, base, key.unit));
}

MetricValue metric_value(const MetricKey& key, const AreaSlice& slice, const ProposalRatios& ratios,
                         const Instance& instance) {
  return key.scope == Scope::Impact ? impact_value(key, slice, ratios, instance)
                                    : novelty_value(key, slice, instance);
}

Rational loss(const MetricValue& value_ug, const MetricValue& value_es) {
  if (!value_ug.defined || !value_es.defined)
    throw Error(ErrorCode::UndefinedOperand, "loss needs two defined metric values");
  Rational d = value_ug.value() - value_es.value();
  d.canonicalize();
  return d;
}

Rational relative_loss(const MetricValue& value_ug, const MetricValue& value_es) {
  const Rational d = loss(value_ug, value_es);
  const Rational ug = value_ug.value();
  if (ug == 0) throw Error(ErrorCode::DivisionByZero, "relative loss with a zero greedy value");
  Rational r = d / ug;
  r.canonicalize();
  return r;
}

Rational budget_utilization(const Outcome& outcome, const Instance& instance) {
  if (instance.budget() == 0) return 0;
  Rational r = outcome.total_cost / instance.budget();
  r.canonicalize();
  return r;
}

MetricValue beneficiary_representation(const Instance& instance, const Outcome& outcome, Beneficiary beneficiary) {
  const auto winners = outcome.winner_set();
  unsigned long proposed = 0, won = 0;
  for (const auto& p : instance.projects()) {
    if (!p.beneficiaries.count(beneficiary)) continue;
    ++proposed;
    if (winners.count(p.id)) ++won;
  }
  return MetricValue::ratio(Rational(won), Rational(proposed));
}

std::vector<std::string> popularity_ranking(const Instance& instance) {
  const auto& pop = instance.popularity_vector();
  const auto& projects = instance.projects();
  std::vector<std::size_t> order(projects.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pop[a] != pop[b]) return pop[a] > pop[b];
    return IdLess{}(projects[a].id, projects[b].id);
  });
  std::vector<std::string> ids;
  ids.reserve(order.size());
  for (auto i : order) ids.push_back(projects[i].id);
  return ids;
}

RankedSelection ranked_selection(const Instance& instance, const Outcome& outcome) {
  return {popularity_ranking(instance), outcome.winner_set()};
}

std::vector<SelectionRatePoint> top_n_selection_rate(const std::vector<RankedSelection>& corpus, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::UsageError, "top-n needs n >= 1");
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "no instances for the selection rate");
  std::vector<SelectionRatePoint> points(n);
  for (std::size_t k = 0; k < n; ++k) {
    unsigned long hits = 0, total = 0;
    for (const auto& inst : corpus) {
      if (inst.ranked_ids.size() <= k) continue;
      ++total;
      if (inst.winners.count(inst.ranked_ids[k])) ++hits;
    }
    points[k].n = total;
    points[k].rate = total == 0 ? Rational(0) : Rational(hits, total);
    points[k].rate.canonicalize();
  }
  return points;
}

}  // namespace pbimpact
