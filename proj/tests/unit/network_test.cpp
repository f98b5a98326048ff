#include "lqm/network.hpp"

#include <algorithm>

#include "doctest.h"
#include "lqm/builders.hpp"

using namespace lqm;

namespace {

bool mentions(const std::vector<Violation>& list, const std::string& entity,
              const std::string& fragment) {
  return std::any_of(list.begin(), list.end(), [&](const Violation& v) {
    return v.entity == entity && v.to_string().find(fragment) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("the four-arm intersection validates cleanly") {
  const Scenario s = build_paper_intersection();
  const auto result = validate_scenario(s);
  for (const auto& v : result.violations) INFO(v.to_string());
  CHECK(result.violations.empty());
}

TEST_CASE("a short turning-rate row is reported against its link") {
  Scenario s = build_paper_intersection();
  for (auto& node : s.nodes) {
    for (auto& t : node.turning_rates) {
      if (t.from == 25 && t.rate == 0.6) t.rate = 0.5;  // row now sums to 0.9
    }
  }
  const auto result = validate_scenario(s);
  CHECK(mentions(result.violations, "node 2", "link 25"));
  CHECK(mentions(result.violations, "node 2", "row sum"));
}

TEST_CASE("an oversubscribed conflict set is reported with its sum") {
  Scenario s = build_paper_intersection();
  for (auto& node : s.nodes) {
    if (node.conflict_sets.empty()) continue;
    const LinkId a = node.conflict_sets[0][0];
    const LinkId b = node.conflict_sets[0][1];
    node.conflict_sets = {{a, b}};  // two movements at 0.6 + 0.6
    node.green_fraction[a] = StepSeries(0.6);
    node.green_fraction[b] = StepSeries(0.6);
  }
  const auto result = validate_scenario(s);
  REQUIRE_FALSE(result.violations.empty());
  bool found = false;
  for (const auto& v : result.violations) {
    if (v.invariant.find("conflict-set") != std::string::npos) {
      found = true;
      CHECK(v.step == 0);
      CHECK(v.detail.find("1.2") != std::string::npos);
    }
  }
  CHECK(found);
}

TEST_CASE("validation is pure") {
  Scenario s = build_paper_intersection();
  s.links[0].jam_density = -1.0;
  const auto first = validate_scenario(s);
  const auto second = validate_scenario(s);
  REQUIRE(first.violations.size() == second.violations.size());
  for (std::size_t i = 0; i < first.violations.size(); ++i) {
    CHECK(first.violations[i].to_string() == second.violations[i].to_string());
  }
}

TEST_CASE("negative rates and speeds are violations") {
  Scenario s = build_paper_intersection();
  s.demand.begin()->second = StepSeries(-0.1);
  s.links[0].speed = StepSeries(0.0);
  const auto result = validate_scenario(s);
  CHECK(mentions(result.violations, "link " + std::to_string(s.links[0].id), "v_f(k) > 0"));
  bool demand_flagged = false;
  for (const auto& v : result.violations) {
    if (v.invariant.find("demand rates") != std::string::npos) demand_flagged = true;
  }
  CHECK(demand_flagged);
}

TEST_CASE("horizon and dt bounds") {
  Scenario s = build_paper_intersection();
  s.dt = 0.0;
  s.horizon_steps = 0;
  const auto result = validate_scenario(s);
  CHECK(mentions(result.violations, "scenario", "dt > 0"));
  CHECK(mentions(result.violations, "scenario", "horizon_steps"));
}
