#include <doctest.h>

#include "oreo/ric_state.hpp"
#include "test_support.hpp"

using namespace oreo;
using namespace testsup;

namespace {

// s1 deployed on its only config with one instance.
Assignment simple_assignment(const Catalog& c, double cpu, double mem, double disk) {
  (void)c;
  Assignment a;
  ConfigKey key{"s1", "c1"};
  InstanceId inst{"f1", 1, 0};
  a.selected.insert(key);
  a.uses.insert({key, inst});
  a.rho[inst] = {cpu, mem, disk};
  return a;
}

}  // namespace

TEST_CASE("objective") {
  Catalog c = single_service_catalog();
  SUBCASE("empty assignment") { CHECK(objective(Assignment{}, c) == 0.0); }
  SUBCASE("ten percent of each budget") {
    Assignment a = simple_assignment(c, 10.0, 0.1, 0.1);  // budgets 100, 1, 1
    CHECK(objective(a, c) == doctest::Approx(0.9));
  }
  SUBCASE("two services, degenerate zero resources") {
    Catalog c2 = catalog({fn("f1", {xapp("f1", 1, 1.0, 0.9)})},
                         {svc("s1", 1, 0.5, 0.8, 1, {cfg("c1", {"f1"})}),
                          svc("s2", 2, 0.5, 0.8, 1, {cfg("c1", {"f1"})})});
    Assignment a;
    a.selected.insert({"s1", "c1"});
    a.selected.insert({"s2", "c1"});
    CHECK(objective(a, c2) == doctest::Approx(3.0));
  }
}

TEST_CASE("aggregate_load") {
  Catalog c = catalog({fn("f1", {xapp("f1", 1, 1.0, 0.9)})},
                      {svc("s1", 1, 0.5, 0.8, 2.0, {cfg("c1", {"f1"})}),
                       svc("s2", 1, 0.5, 0.8, 3.0, {cfg("c1", {"f1"})}),
                       svc("s3", 1, 0.5, 0.8, 4.0, {cfg("c1", {"f1"})})});
  InstanceId shared{"f1", 1, 0};

  SUBCASE("unused instance carries no load") {
    CHECK(aggregate_load(shared, Assignment{}, c) == 0.0);
  }
  SUBCASE("two sharers add up") {
    Assignment a;
    for (const char* sid : {"s1", "s2"}) {
      a.selected.insert({sid, "c1"});
      a.uses.insert({{sid, "c1"}, shared});
    }
    CHECK(aggregate_load(shared, a, c) == doctest::Approx(5.0));
  }
  SUBCASE("single user") {
    Assignment a;
    a.selected.insert({"s3", "c1"});
    a.uses.insert({{"s3", "c1"}, shared});
    CHECK(aggregate_load(shared, a, c) == doctest::Approx(4.0));
    // an unselected configuration contributes nothing
    a.uses.insert({{"s1", "c1"}, shared});
    CHECK(aggregate_load(shared, a, c) == doctest::Approx(4.0));
  }
}

TEST_CASE("check_feasibility") {
  Catalog c = single_service_catalog();  // T=0.5, Q=0.8, q_base=0.9, theta=1, lambda=1

  SUBCASE("empty assignment is feasible") {
    CHECK(check_feasibility(Assignment{}, DeploymentState{}, c).feasible());
  }
  SUBCASE("well-sized deployment is feasible") {
    Assignment a = simple_assignment(c, required_cpu(1.0, 1.0, 0.49), 0.01, 0.01);
    auto report = check_feasibility(a, DeploymentState{}, c);
    CHECK(report.feasible());
  }
  SUBCASE("uncovered function") {
    Assignment a;
    a.selected.insert({"s1", "c1"});
    auto report = check_feasibility(a, DeploymentState{}, c);
    REQUIRE(report.items.size() == 1);
    CHECK(report.items[0].tag == ConstraintTag::kFuncCover);
    CHECK(report.items[0].entity == "s1/c1/f1");
  }
  SUBCASE("budget overshoot reports its slack") {
    Assignment a = simple_assignment(c, 120.0, 0.01, 0.01);  // budget cpu = 100
    auto report = check_feasibility(a, DeploymentState{}, c);
    REQUIRE(report.items.size() == 1);
    CHECK(report.items[0].tag == ConstraintTag::kBudget);
    CHECK(report.items[0].slack == doctest::Approx(20.0));
  }
  SUBCASE("quality violation carries the gap") {
    Catalog strict = single_service_catalog(1, 0.5, 0.95, 1, 1.0, 0.9);
    Assignment a = simple_assignment(strict, required_cpu(1.0, 1.0, 0.49), 0.01, 0.01);
    auto report = check_feasibility(a, DeploymentState{}, strict);
    REQUIRE(report.items.size() == 1);
    CHECK(report.items[0].tag == ConstraintTag::kQuality);
    CHECK(report.items[0].slack == doctest::Approx(0.05));
  }
  SUBCASE("unstable queue surfaces as a latency violation") {
    Assignment a = simple_assignment(c, 0.5, 0.01, 0.01);  // capacity 0.5 < load 1
    auto report = check_feasibility(a, DeploymentState{}, c);
    REQUIRE(report.items.size() == 1);
    CHECK(report.items[0].tag == ConstraintTag::kLatency);
  }
  SUBCASE("storage shortfall") {
    Assignment a = simple_assignment(c, 3.0, 0.001, 0.01);  // mem_req = 0.01
    auto report = check_feasibility(a, DeploymentState{}, c);
    REQUIRE(report.items.size() == 1);
    CHECK(report.items[0].tag == ConstraintTag::kStorage);
    CHECK(report.items[0].slack == doctest::Approx(0.009));
  }
  SUBCASE("duplicate configuration selection") {
    Catalog two = catalog({fn("f1", {xapp("f1", 1, 1.0, 0.9)})},
                          {svc("s1", 1, 0.5, 0.8, 1, {cfg("c1", {"f1"}), cfg("c2", {"f1"})})});
    Assignment a;
    a.selected.insert({"s1", "c1"});
    a.selected.insert({"s1", "c2"});
    auto report = check_feasibility(a, DeploymentState{}, two);
    bool found = false;
    for (const auto& v : report.items) found |= v.tag == ConstraintTag::kCfgUnique;
    CHECK(found);
  }
}

TEST_CASE("transition_sets") {
  Catalog c = single_service_catalog();
  InstanceId old_inst{"f1", 1, 0}, new_inst{"f1", 1, 1};

  DeploymentState state;
  state.previous = simple_assignment(c, 3.0, 0.01, 0.01);

  SUBCASE("no continuing services") {
    auto [f1, f2] = transition_sets(state, simple_assignment(c, 3.0, 0.01, 0.01));
    CHECK(f1.empty());
    CHECK(f2.empty());
  }
  SUBCASE("service keeps its instance") {
    state.protected_services.insert("s1");
    Assignment next = simple_assignment(c, 4.0, 0.01, 0.01);
    auto [f1, f2] = transition_sets(state, next);
    CHECK(f1 == std::set<InstanceId>{old_inst});
    CHECK(f2 == std::set<InstanceId>{old_inst});
  }
  SUBCASE("service migrates to a new replica") {
    state.protected_services.insert("s1");
    Assignment next;
    next.selected.insert({"s1", "c1"});
    next.uses.insert({{"s1", "c1"}, new_inst});
    next.rho[new_inst] = {3.0, 0.01, 0.01};
    auto [f1, f2] = transition_sets(state, next);
    CHECK(f1 == std::set<InstanceId>{old_inst});
    CHECK(f2 == std::set<InstanceId>{new_inst});
  }
}

TEST_CASE("transition_budget_check") {
  Catalog c = single_service_catalog();
  DeploymentState state;
  state.previous = simple_assignment(c, 60.0, 0.01, 0.01);
  state.protected_services.insert("s1");

  SUBCASE("keeping the instance reduces to a plain budget check") {
    Assignment next = simple_assignment(c, 90.0, 0.01, 0.01);  // same instance id
    auto [f1, f2] = transition_sets(state, next);
    CHECK(transition_budget_check(f1, f2, state, next, c).empty());
  }
  SUBCASE("migration that cannot co-exist is reported") {
    Assignment next;
    next.selected.insert({"s1", "c1"});
    InstanceId new_inst{"f1", 1, 1};
    next.uses.insert({{"s1", "c1"}, new_inst});
    next.rho[new_inst] = {50.0, 0.01, 0.01};  // 60 + 50 > 100
    auto [f1, f2] = transition_sets(state, next);
    auto violations = transition_budget_check(f1, f2, state, next, c);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].tag == ConstraintTag::kTransition);
    CHECK(violations[0].slack == doctest::Approx(10.0));
  }
  SUBCASE("empty previous state never trips the transition check") {
    Assignment next = simple_assignment(c, 99.0, 0.01, 0.01);
    auto [f1, f2] = transition_sets(DeploymentState{}, next);
    CHECK(transition_budget_check(f1, f2, DeploymentState{}, next, c).empty());
  }
}

TEST_CASE("replica canonicalization adopts continuing instances") {
  Catalog c = single_service_catalog();
  DeploymentState state;
  state.previous = simple_assignment(c, 3.0, 0.01, 0.01);  // instance f1:1#0
  state.protected_services.insert("s1");

  Assignment next;
  next.selected.insert({"s1", "c1"});
  InstanceId scratch{"f1", 1, 5};
  next.uses.insert({{"s1", "c1"}, scratch});
  next.rho[scratch] = {4.0, 0.01, 0.01};

  Assignment canon = canonicalize_replicas(next, state, c);
  InstanceId adopted{"f1", 1, 0};
  CHECK(canon.rho.count(adopted) == 1);
  CHECK(canon.uses.count({{"s1", "c1"}, adopted}) == 1);

  // and the transition check then sees a kept instance, not a migration
  auto [f1, f2] = transition_sets(state, canon);
  CHECK(f1 == f2);
}
