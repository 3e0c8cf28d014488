#include <doctest.h>

#include <chrono>

#include "oreo/engine.hpp"
#include "oreo/json_io.hpp"
#include "oreo/oracle.hpp"
#include "oreo/scenario.hpp"
#include "test_support.hpp"

using namespace oreo;
using namespace testsup;

TEST_CASE("zero services stop immediately on the gap criterion") {
  Catalog c = catalog({fn("f1", {xapp("f1", 1, 1.0, 0.9)})}, {});
  auto plan = solve(c, DeploymentState{}, EngineParams{});
  CHECK(plan.assignment.empty());
  CHECK(plan.objective == 0.0);
  CHECK(plan.iterations == 1);
  CHECK(plan.stop_reason == StopReason::kGap);
}

TEST_CASE("an invalid catalog is rejected up front") {
  Catalog c = single_service_catalog();
  c.budget.cpu = -1.0;
  CHECK_THROWS_AS(solve(c, DeploymentState{}, EngineParams{}), std::invalid_argument);
}

TEST_CASE("single abundant service matches the exact oracle") {
  Catalog c = single_service_catalog(2.0, 0.5, 0.8, 1.0, 1.0, 0.9);
  auto plan = solve(c, DeploymentState{}, EngineParams{});
  auto oracle = solve_exact(c, DeploymentState{}, OracleLimits{});
  REQUIRE_FALSE(oracle.exceeded);
  CHECK(plan.assignment.selected == std::set<ConfigKey>{{"s1", "c1"}});
  CHECK(plan.objective == doctest::Approx(oracle.plan.objective).epsilon(1e-9));
  CHECK(check_feasibility(plan.assignment, DeploymentState{}, c).feasible());
}

TEST_CASE("desk-scale run terminates fast with sane bounds") {
  Catalog c = generate_scenario(ScenarioParams::for_scale("S", 3));
  auto t0 = std::chrono::steady_clock::now();
  auto plan = solve(c, DeploymentState{}, EngineParams{});
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  CHECK(seconds < 1.0);
  CHECK(plan.iterations <= 300);
  REQUIRE(!plan.trace.empty());

  double prev_best = -1e300;
  for (const auto& row : plan.trace) {
    CHECK(row.upper_bound >= row.best_feasible - 1e-9);  // bound sandwich per iteration
    CHECK(row.best_feasible >= prev_best - 1e-12);       // best feasible never regresses
    prev_best = row.best_feasible;
  }
  CHECK(plan.objective <= plan.upper_bound + 1e-9);
  CHECK(check_feasibility(plan.assignment, DeploymentState{}, c).feasible());
}

TEST_CASE("fixed instance yields a bit-identical plan") {
  Catalog c = generate_scenario(ScenarioParams::for_scale("M", 11));
  auto p1 = solve(c, DeploymentState{}, EngineParams{});
  auto p2 = solve(c, DeploymentState{}, EngineParams{});
  CHECK(plan_to_json(p1) == plan_to_json(p2));
}

TEST_CASE("engine respects the transition constraint across epochs") {
  Catalog c = generate_scenario(ScenarioParams::for_scale("S", 9));
  auto first = solve(c, DeploymentState{}, EngineParams{});

  DeploymentState state;
  state.previous = first.assignment;
  for (const auto& key : first.assignment.selected) state.protected_services.insert(key.service);

  auto second = solve(c, state, EngineParams{});
  CHECK(check_feasibility(second.assignment, state, c).feasible());
}
