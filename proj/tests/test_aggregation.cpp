#include <random>

#include "doctest.h"
#include "pbimpact/errors.hpp"
#include "pbimpact/metrics.hpp"
#include "pbimpact/pabulib_io.hpp"
#include "support.hpp"

using namespace pbimpact;
using testsupport::approval;
using testsupport::q;
using testsupport::toy_instance;

namespace {

using Ids = std::vector<std::string>;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::UsageError;
}

Instance scaled(const Instance& inst, const Rational& k) {
  auto projects = inst.projects();
  for (auto& p : projects) p.cost *= k;
  return Instance(inst.budget() * k, projects, inst.ballots(), inst.vote_type());
}

}  // namespace

TEST_CASE("greedy on the toy") {
  const auto out = utilitarian_greedy(toy_instance());
  CHECK(out.winners == Ids{"A", "C"});
  CHECK(out.total_cost == 950);
  CHECK(out.leftover == 50);
  CHECK(budget_utilization(out, toy_instance()) == q(19, 20));
  CHECK(out.payments.empty());
}

TEST_CASE("greedy skips and continues, never picks unpopular projects") {
  std::vector<Project> ps = {{"big", 90, {}, {}, ""}, {"mid", 30, {}, {}, ""}, {"small", 10, {}, {}, ""},
                             {"orphan", 1, {}, {}, ""}};
  const Instance inst(100, ps, {approval("1", {"big", "mid", "small"}), approval("2", {"mid", "small"}),
                                approval("3", {"small"})},
                      VoteType::Approval);
  CHECK(utilitarian_greedy(inst).winners == Ids{"small", "mid"});
  CHECK(greedy_order(inst).back() == 3);
}

TEST_CASE("greedy ties break on cost then id") {
  std::vector<Project> ps = {{"10", 5, {}, {}, ""}, {"9", 5, {}, {}, ""}, {"2", 4, {}, {}, ""}};
  const Instance inst(9, ps, {approval("1", {"10", "9", "2"})}, VoteType::Approval);
  CHECK(utilitarian_greedy(inst).winners == Ids{"2", "9"});
}

TEST_CASE("price per supporter") {
  CHECK(price_per_supporter({q(10), q(10)}, 10) == q(5));
  CHECK(price_per_supporter({q(2), q(10), q(10)}, 12) == q(5));
  CHECK(price_per_supporter({q(1), q(1)}, 2) == q(1));
  CHECK_FALSE(price_per_supporter({q(1), q(1)}, 3));
  CHECK_FALSE(price_per_supporter({}, 1));
  CHECK(price_per_supporter({q(1, 3), q(5)}, q(7, 3)) == q(2));
}

TEST_CASE("equal shares core on the toy") {
  const auto toy = toy_instance();
  const auto out = equal_shares_core(toy, q(1000, 11));
  CHECK(out.winners == Ids{"E", "C"});
  CHECK(out.total_cost == 350);
  CHECK(out.payments.at("7").at("E") == q(100, 3));
  CHECK(out.payments.at("2").at("C") == 50);
  CHECK(testsupport::check_equal_shares(toy, out).empty());
  CHECK(compute_outcome(toy, RuleId::MesCore) == out);
}

TEST_CASE("add1 ladder on X/W/V") {
  const auto inst = testsupport::xwv_instance();
  const auto add1 = equal_shares_add1(inst);
  CHECK(add1.rule == RuleId::MesAdd1);
  CHECK(add1.winners == Ids{"X"});
  CHECK(add1.endowment_used == q(74));
  CHECK(add1.payments.at("1").at("X") == 20);

  const auto add1u = equal_shares_add1u(inst);
  CHECK(add1u.winners == Ids{"X", "V"});
  CHECK(add1u.leftover == 5);
  CHECK(add1u.completion_payments.at("V") == 55);
  CHECK(testsupport::check_equal_shares(inst, add1u).empty());
}

TEST_CASE("add1 stops once nothing else fits") {
  // Two voters, one 40-cost project each: the base endowment already buys both.
  std::vector<Project> ps = {{"a", 40, {}, {}, ""}, {"b", 40, {}, {}, ""}};
  const Instance inst(100, ps, {approval("1", {"a"}), approval("2", {"b"})}, VoteType::Approval);
  const auto out = equal_shares_add1(inst);
  CHECK(out.winners.size() == 2);
  CHECK(out.endowment_used == 50);
}

TEST_CASE("add1 walks up to the first endowment that buys more") {
  std::vector<Project> ps = {{"X", 80, {}, {}, ""}, {"Y", 60, {}, {}, ""}};
  const Instance inst(200, ps, {approval("1", {"X", "Y"}), approval("2", {"Y"})}, VoteType::Approval);
  const auto out = equal_shares_add1(inst);
  CHECK(out.winners == Ids{"Y", "X"});
  CHECK(out.endowment_used == 110);
  auto smaller = equal_shares_add1(inst, q(1, 4));
  CHECK(smaller.winners == Ids{"Y", "X"});
}

TEST_CASE("fractional increments keep the core equality") {
  const auto toy = toy_instance();
  for (const auto& inc : {q(1), q(5), q(1, 2)}) {
    auto out = equal_shares_add1(toy, inc);
    auto core = equal_shares_core(toy, *out.endowment_used);
    core.rule = RuleId::MesAdd1;
    CHECK(out == core);
    CHECK(out.total_cost <= toy.budget());
  }
}

TEST_CASE("rule preconditions") {
  std::vector<Project> ps = {{"1", 10, {}, {}, ""}};
  const Instance scored(100, ps, {{"a", {"1"}, {q(2)}}}, VoteType::Scoring);
  CHECK(code_of([&] { equal_shares_core(scored, 10); }) == ErrorCode::NonApprovalUnsupported);
  CHECK(utilitarian_greedy(scored).winners == Ids{"1"});
  const Instance ordinal(100, ps, {approval("a", {"1"})}, VoteType::Ordinal);
  CHECK(code_of([&] { utilitarian_greedy(ordinal); }) == ErrorCode::OrdinalUnsupported);
  const Instance empty(100, ps, {}, VoteType::Approval);
  CHECK(code_of([&] { equal_shares_add1(empty); }) == ErrorCode::NoVoters);
  CHECK(code_of([&] { equal_shares_add1(toy_instance(), 0); }) == ErrorCode::InvalidInstance);
}

TEST_CASE("exclusive winners") {
  const auto toy = toy_instance();
  const auto ug = make_outcome(toy, RuleId::Greedy, {"A", "B"});
  const auto es = make_outcome(toy, RuleId::MesAdd1u, {"A", "D", "E"});
  const auto pair = exclusive_winners(ug, es);
  CHECK(pair.only_a == std::set<std::string>{"B"});
  CHECK(pair.only_b == std::set<std::string>{"D", "E"});
  const auto other = make_outcome(toy.with_budget(999), RuleId::Greedy, {"A"});
  CHECK(code_of([&] { exclusive_winners(ug, other); }) == ErrorCode::InstanceMismatch);
  CHECK(code_of([&] { make_outcome(toy, RuleId::Greedy, {"Q"}); }) == ErrorCode::UnknownProjectRef);
}

TEST_CASE("randomised: greedy oracle and equal-shares invariants") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 150; ++i) {
    const auto inst = testsupport::random_instance(rng);
    CAPTURE(serialize_instance(inst));
    CHECK(utilitarian_greedy(inst).winners == testsupport::ref_greedy(inst));
    for (auto rule : {RuleId::MesCore, RuleId::MesAdd1, RuleId::MesAdd1u})
      CHECK(testsupport::check_equal_shares(inst, compute_outcome(inst, rule)) == "");
  }
}

TEST_CASE("randomised: rho matches the unsorted reference") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(0, 40), den(1, 6), cnt(1, 7);
  for (int i = 0; i < 500; ++i) {
    std::vector<Rational> budgets;
    Rational total = 0;
    for (int k = cnt(rng); k > 0; --k) {
      budgets.push_back(q(num(rng), den(rng)));
      total += budgets.back();
    }
    const Rational cost = total * q(num(rng) + 1, 30);
    CHECK(price_per_supporter(budgets, cost) == testsupport::ref_rho(budgets, cost));
  }
}

TEST_CASE("randomised: outcomes are invariant to rescaling money") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 60; ++i) {
    const auto inst = testsupport::random_instance(rng);
    const auto big = scaled(inst, q(7, 3));
    CHECK(utilitarian_greedy(inst).winners == utilitarian_greedy(big).winners);
    CHECK(compute_outcome(inst, RuleId::MesCore).winners == compute_outcome(big, RuleId::MesCore).winners);
  }
}

TEST_CASE("greedy budget extremes") {
  CHECK(utilitarian_greedy(toy_instance(1650)).winners.size() == 5);
  CHECK(utilitarian_greedy(toy_instance(0)).winners.empty());
}

TEST_CASE("equal shares small traces") {
  std::vector<Project> ps = {{"X", 60, {}, {}, ""}, {"Y", 50, {}, {}, ""}};
  const Instance inst(100, ps, {approval("1", {"X", "Y"}), approval("2", {"X"})}, VoteType::Approval);
  CHECK(equal_shares_core(inst, 50).winners == Ids{"X"});
  CHECK(equal_shares_core(inst, 0).winners.empty());

  std::vector<Project> ladder = {{"X", 80, {}, {}, ""}, {"Y", 20, {}, {}, ""}};
  const Instance two(100, ladder, {approval("1", {"X"}), approval("2", {"Y"})}, VoteType::Approval);
  CHECK(equal_shares_core(two, 50).winners == Ids{"Y"});
  const auto out = equal_shares_add1(two);
  CHECK(out.winners == Ids{"Y", "X"});
  CHECK(out.endowment_used == 80);
  CHECK(out.total_cost == 100);
  // Budget exhausted: the completion has nothing to add.
  CHECK(equal_shares_add1u(two).winners == out.winners);
}

TEST_CASE("exclusive winners edge cases") {
  const auto toy = toy_instance();
  const auto a = make_outcome(toy, RuleId::Greedy, {"A"});
  const auto b = make_outcome(toy, RuleId::MesCore, {"B"});
  CHECK(exclusive_winners(a, a).only_a.empty());
  CHECK(exclusive_winners(a, b).only_a == std::set<std::string>{"A"});
  CHECK(exclusive_winners(a, b).only_b == std::set<std::string>{"B"});
}
