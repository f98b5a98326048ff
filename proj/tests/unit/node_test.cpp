#include "lqm/node_model.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "verify/generators.hpp"
#include "verify/node_oracle.hpp"

using namespace lqm;

namespace {

NodeStepProblem merge(double supply, std::vector<double> desired) {
  NodeStepProblem p;
  p.outgoing = {100};
  p.residual_supply = {supply};
  for (std::size_t j = 0; j < desired.size(); ++j) {
    p.feeders.push_back({static_cast<LinkId>(j + 1), desired[j], {1.0}});
  }
  return p;
}

}  // namespace

TEST_CASE("beta measures the admitted share") {
  CHECK(beta(0.3, 0.6) == doctest::Approx(0.5));
  CHECK(beta(0.0, 0.0) == doctest::Approx(1.0));
  CHECK(beta(0.7, 0.6) == doctest::Approx(1.0));
}

TEST_CASE("desired inflows route the feeders' releasable increments") {
  NodeStepProblem p;
  p.outgoing = {100};
  p.residual_supply = {50.0};
  p.feeders.push_back({1, 4.0, {0.5}});
  p.feeders.push_back({2, 2.0, {1.0}});
  const auto desired = desired_inflows(p, {7.0}, 10.0);
  REQUIRE(desired.size() == 1);
  CHECK(desired[0].cum_in == doctest::Approx(11.0));
  CHECK(desired[0].rate == doctest::Approx(0.4));

  // single pass-through feeder
  const auto single = desired_inflows(merge(50.0, {3.0}), {1.0}, 10.0);
  CHECK(single[0].cum_in == doctest::Approx(4.0));

  // every feeder at red: nothing is desired and beta is 1
  const auto red = desired_inflows(merge(50.0, {0.0, 0.0}), {1.0}, 10.0);
  CHECK(red[0].rate == doctest::Approx(0.0));
  CHECK(beta(5.0, red[0].rate) == doctest::Approx(1.0));
}

TEST_CASE("scarce merge settles feeders in id order") {
  const auto solution = allocate(merge(5.0, {4.0, 4.0}));
  CHECK(solution.outflow[0] == doctest::Approx(4.0));
  CHECK(solution.outflow[1] == doctest::Approx(1.0));
  CHECK(solution.inflow[0] == doctest::Approx(5.0));
}

TEST_CASE("an unconstrained node releases everything") {
  const auto solution = allocate(merge(10.0, {4.0, 4.0}));
  CHECK(solution.outflow[0] == doctest::Approx(4.0));
  CHECK(solution.outflow[1] == doctest::Approx(4.0));
}

TEST_CASE("a shared lane is throttled by its tightest direction") {
  NodeStepProblem p;
  p.outgoing = {100, 101};
  p.residual_supply = {1.0, 100.0};
  p.feeders.push_back({1, 4.0, {0.5, 0.5}});
  const auto solution = allocate(p);
  CHECK(solution.outflow[0] == doctest::Approx(2.0));
  CHECK(solution.inflow[0] == doctest::Approx(1.0));
  CHECK(solution.inflow[1] == doctest::Approx(1.0));
}

TEST_CASE("the two-feeder merge worked example") {
  // supply 300 against desires 220 and 150
  const NodeStepProblem p = merge(300.0, {220.0, 150.0});

  const auto by_allocate = allocate(p);
  CHECK(by_allocate.outflow[0] == doctest::Approx(220.0));
  CHECK(by_allocate.outflow[1] == doctest::Approx(80.0));
  CHECK(verify::holding_free(p, by_allocate));

  const auto order12 = verify::oracle_node(p, {0, 1});
  CHECK(order12.outflow[0] == doctest::Approx(220.0));
  CHECK(order12.outflow[1] == doctest::Approx(80.0));

  const auto order21 = verify::oracle_node(p, {1, 0});
  CHECK(order21.outflow[0] == doctest::Approx(150.0));
  CHECK(order21.outflow[1] == doctest::Approx(150.0));
  CHECK(verify::holding_free(p, order21));

  // raising the constrained feeder's desire does not change the solution
  NodeStepProblem raised = p;
  raised.feeders[1].desired = 250.0;
  const auto invariant = verify::oracle_node(raised, {0, 1});
  CHECK(invariant.outflow[1] == doctest::Approx(80.0));
}

TEST_CASE("allocate rejects non-finite inputs") {
  NodeStepProblem p = merge(5.0, {4.0});
  p.feeders[0].desired = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(allocate(p), std::invalid_argument);
}

TEST_CASE("allocate matches the fixed-order greedy without lane sharing") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto problem = verify::random_node_problem(rng, /*lane_sharing=*/false);
    const auto got = allocate(problem);
    const auto want = verify::oracle_node(problem, verify::ascending_order(problem));
    for (std::size_t j = 0; j < problem.feeders.size(); ++j) {
      CHECK(got.outflow[j] == doctest::Approx(want.outflow[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("invariance property holds over 1000 random problems") {
  std::mt19937 rng(31337);
  std::uniform_real_distribution<double> bump(0.5, 5.0);
  int supply_cases = 0, demand_cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto problem =
        verify::random_node_problem(rng, trial % 2 == 0, /*ample_supply=*/trial % 3 == 0);
    const auto result = verify::property_invariance(problem, bump(rng));
    CHECK(result.pass);
    supply_cases += result.supply_case ? 1 : 0;
    demand_cases += result.demand_case ? 1 : 0;
  }
  CHECK(supply_cases > 100);
  CHECK(demand_cases > 100);
}

TEST_CASE("with lane sharing the solution is reachable by some feeder order") {
  std::mt19937 rng(99);
  int exercised = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto problem = verify::random_node_problem(rng, /*lane_sharing=*/true);
    const auto got = allocate(problem);
    bool matched = false;
    for (const auto& order : verify::all_feeder_orders(problem)) {
      const auto candidate = verify::oracle_node(problem, order);
      bool same = true;
      for (std::size_t j = 0; j < problem.feeders.size(); ++j) {
        if (std::abs(candidate.outflow[j] - got.outflow[j]) > 1e-9) same = false;
      }
      if (same) {
        matched = true;
        break;
      }
    }
    CHECK(matched);
    if (problem.feeders.size() > 1) ++exercised;
  }
  CHECK(exercised > 100);
}

TEST_CASE("allocation conserves and never oversupplies") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const auto problem = verify::random_node_problem(rng, trial % 2 == 0);
    const auto solution = allocate(problem);
    double out_total = 0.0, in_total = 0.0;
    for (double q : solution.outflow) out_total += q;
    for (double q : solution.inflow) in_total += q;
    CHECK(in_total == doctest::Approx(out_total).epsilon(1e-9));
    for (std::size_t i = 0; i < problem.residual_supply.size(); ++i) {
      CHECK(solution.inflow[i] <= problem.residual_supply[i] + 1e-9);
    }
    for (std::size_t j = 0; j < problem.feeders.size(); ++j) {
      CHECK(solution.outflow[j] >= -1e-12);
      CHECK(solution.outflow[j] <= problem.feeders[j].desired + 1e-12);
    }
  }
}

TEST_CASE("allocate handles infinite downstream supply") {
  NodeStepProblem p;
  p.outgoing = {100};
  p.residual_supply = {std::numeric_limits<double>::infinity()};
  p.feeders.push_back({1, 7.0, {1.0}});
  const auto solution = allocate(p);
  CHECK(solution.outflow[0] == doctest::Approx(7.0));
}
