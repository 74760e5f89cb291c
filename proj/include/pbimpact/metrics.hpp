#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pbimpact/aggregation.hpp"
#include "pbimpact/election.hpp"

namespace pbimpact {

enum class Level { Outcome, Ballot };
enum class Calc { Share, Representation, Proportionality };
enum class Unit { Cost, Projects, Popularity };
enum class Scope { Impact, WithinNovelty, BetweenNovelty };

std::string_view to_string(Level level);
std::string_view to_string(Unit unit);
/// Report column name: share, representation, proportionality for impact
/// keys; within_novelty / between_novelty for the novelty scopes.
std::string_view calc_column(Calc calc, Scope scope);

struct MetricKey {
  Level level = Level::Outcome;
  Calc calc = Calc::Share;
  Unit unit = Unit::Cost;
  Scope scope = Scope::Impact;

  /// Ballot level never uses popularity; novelty scopes only use share.
  bool valid() const;
  std::string_view calc_name() const { return calc_column(calc, scope); }

  auto operator<=>(const MetricKey&) const = default;
};

/// Every valid key (25 of them) in reporting order.
const std::vector<MetricKey>& all_metric_keys();

/// A ratio kept as numerator and denominator so that unreduced forms such as
/// 1000/1000 survive into reports. `defined` is false on a zero denominator.
struct MetricValue {
  Rational numerator = 0;
  Rational denominator = 0;
  bool defined = false;

  static MetricValue ratio(Rational numerator, Rational denominator);
  Rational value() const;
  double as_double() const;
  /// "num/den", each side a decimal, parenthesised when itself a fraction.
  std::string to_string() const;

  bool operator==(const MetricValue&) const = default;
};

using IdSet = std::set<std::string>;

struct AreaSlice {
  ImpactArea area = ImpactArea::Other;
  RuleId rule = RuleId::Greedy;
  std::optional<std::string> voter;
  IdSet proposed_in_area;                          // P_l
  IdSet winners_in_area;                           // W_{l,f}
  IdSet exclusive_in_area;                         // Ŵ_{l,f}
  std::optional<IdSet> ballot_winners_in_area;     // W_{l,v,f}
  std::optional<IdSet> ballot_exclusive_in_area;   // Ŵ_{l,v,f}
  IdSet all_winners;                               // W_f
  IdSet all_exclusive;                             // Ŵ_f
};

/// `exclusive` is the rule's own exclusive set (Ŵ_f for this outcome).
/// Throws UnknownVoter.
AreaSlice area_slice(const Instance& instance, const Outcome& outcome, const IdSet& exclusive, ImpactArea area,
                     std::optional<std::string_view> voter = std::nullopt);

/// Σcost, |S| or Σpopularity over a set of project ids.
Rational measure(const Instance& instance, const IdSet& ids, Unit unit);

/// Share, representation or proportionality. Throws InvalidKey.
MetricValue impact_value(const MetricKey& key, const AreaSlice& slice, const ProposalRatios& ratios,
                         const Instance& instance);

/// Within- or between-novelty. Throws InvalidKey.
MetricValue novelty_value(const MetricKey& key, const AreaSlice& slice, const Instance& instance);

/// Dispatches on key.scope.
MetricValue metric_value(const MetricKey& key, const AreaSlice& slice, const ProposalRatios& ratios,
                         const Instance& instance);

/// UG − ES. Throws UndefinedOperand.
Rational loss(const MetricValue& value_ug, const MetricValue& value_es);
/// (UG − ES) / UG. Throws UndefinedOperand, DivisionByZero.
Rational relative_loss(const MetricValue& value_ug, const MetricValue& value_es);

/// total_cost / budget; 0 for a zero budget.
Rational budget_utilization(const Outcome& outcome, const Instance& instance);

/// |winners tagged b| / |proposals tagged b|.
MetricValue beneficiary_representation(const Instance& instance, const Outcome& outcome, Beneficiary beneficiary);

/// Project ids ranked by popularity desc, id asc.
std::vector<std::string> popularity_ranking(const Instance& instance);

/// Per-instance input to the selection-rate curve.
struct RankedSelection {
  std::vector<std::string> ranked_ids;
  IdSet winners;
};

RankedSelection ranked_selection(const Instance& instance, const Outcome& outcome);

struct SelectionRatePoint {
  Rational rate = 0;
  std::size_t n = 0;  // instances with at least `rank` projects
  bool operator==(const SelectionRatePoint&) const = default;
};

/// Entry k: fraction of instances whose rank-k project wins. Throws EmptyCorpus.
std::vector<SelectionRatePoint> top_n_selection_rate(const std::vector<RankedSelection>& corpus, std::size_t n);

}  // namespace pbimpact
