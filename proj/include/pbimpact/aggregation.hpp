#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pbimpact/election.hpp"

namespace pbimpact {

enum class RuleId { Greedy, MesCore, MesAdd1, MesAdd1u };

std::string_view to_string(RuleId rule);
std::optional<RuleId> rule_from_string(std::string_view name);
bool is_equal_shares(RuleId rule);
/// Reporting role of a rule: "greedy" or "equal_shares".
std::string_view rule_role(RuleId rule);

using PaymentTable = std::map<std::string, std::map<std::string, Rational>>;

struct Outcome {
  RuleId rule = RuleId::Greedy;
  /// Selection order.
  std::vector<std::string> winners;
  /// voter id -> project id -> amount paid (equal-shares rounds only).
  PaymentTable payments;
  /// project id -> cost covered by the utilitarian completion of add1u.
  /// Reported under the reserved payer `completion`.
  std::map<std::string, Rational> completion_payments;
  std::optional<Rational> endowment_used;
  Rational total_cost = 0;
  Rational leftover = 0;
  /// Source instance fingerprint, used to reject mixing outcomes.
  std::string instance_fingerprint;

  std::set<std::string> winner_set() const { return {winners.begin(), winners.end()}; }
  bool contains(std::string_view project_id) const;
  bool operator==(const Outcome&) const = default;
};

inline constexpr std::string_view kCompletionPayer = "completion";

/// Cheap structural fingerprint (budget, project ids and costs, ballot count).
std::string instance_fingerprint(const Instance& instance);

/// Outcome over a caller-supplied winner list. Feasibility is not enforced so
/// that published winner sets can be evaluated as given.
Outcome make_outcome(const Instance& instance, RuleId rule, std::vector<std::string> winners);

/// Projects by popularity desc, cost asc, id asc.
std::vector<std::size_t> greedy_order(const Instance& instance);

/// Skip-and-continue greedy; zero-popularity projects are never selected.
/// Throws OrdinalUnsupported.
Outcome utilitarian_greedy(const Instance& instance);

/// Method of equal shares for approval ballots with a fixed per-voter
/// endowment. Throws NonApprovalUnsupported.
Outcome equal_shares_core(const Instance& instance, const Rational& endowment);

/// Raises the endowment from budget/|V| in `increment` steps and keeps the last
/// budget-feasible outcome. Throws NonApprovalUnsupported, NoVoters.
Outcome equal_shares_add1(const Instance& instance, const Rational& increment = Rational(1));

/// add1 followed by a utilitarian-greedy fill of the leftover budget.
Outcome equal_shares_add1u(const Instance& instance, const Rational& increment = Rational(1));

/// Dispatch by rule id. `increment` only applies to the add1 variants.
Outcome compute_outcome(const Instance& instance, RuleId rule, const Rational& increment = Rational(1));

struct ExclusivePair {
  std::set<std::string> only_a;
  std::set<std::string> only_b;
};

/// Throws InstanceMismatch when the outcomes come from different instances.
ExclusivePair exclusive_winners(const Outcome& a, const Outcome& b);

/// Price per supporter: the least rho with sum(min(budget_i, rho)) == cost.
/// `budgets` need not be sorted; returns nullopt when the total is short.
std::optional<Rational> price_per_supporter(std::vector<Rational> budgets, const Rational& cost);

}  // namespace pbimpact
