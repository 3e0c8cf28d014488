#include <doctest.h>

#include <cmath>

#include "oreo/harness.hpp"
#include "oreo/json_io.hpp"
#include "test_support.hpp"

using namespace oreo;

TEST_CASE("scale presets") {
  auto s = ScenarioParams::for_scale("S", 1);
  CHECK(s.num_services == 8);
  CHECK(s.num_functions == 8);
  CHECK(s.num_levels == 2);
  auto m = ScenarioParams::for_scale("M", 1);
  CHECK(std::tuple(m.num_services, m.num_functions, m.num_levels) == std::tuple(8, 8, 3));
  auto l = ScenarioParams::for_scale("L", 1);
  CHECK(std::tuple(l.num_services, l.num_functions, l.num_levels) == std::tuple(10, 8, 3));
  auto xl = ScenarioParams::for_scale("XL", 1);
  CHECK(std::tuple(xl.num_services, xl.num_functions, xl.num_levels) == std::tuple(12, 10, 3));
  CHECK_THROWS_AS(ScenarioParams::for_scale("XXL", 1), std::invalid_argument);
}

TEST_CASE("identical seeds produce byte-identical catalogs") {
  auto a = catalog_to_json(generate_scenario(ScenarioParams::for_scale("M", 17))).dump();
  auto b = catalog_to_json(generate_scenario(ScenarioParams::for_scale("M", 17))).dump();
  auto other = catalog_to_json(generate_scenario(ScenarioParams::for_scale("M", 18))).dump();
  CHECK(a == b);
  CHECK(a != other);
}

TEST_CASE("canned testbed catalog") {
  Catalog c = canned_testbed_scenario();
  CHECK(validate_catalog(c).empty());

  REQUIRE(c.services.count("slicing"));
  CHECK(c.services.at("slicing").configs.size() == 4);
  CHECK(c.services.at("forecasting").configs.size() == 1);
  CHECK(c.services.at("classification").configs.size() == 1);

  for (const auto& [sid, service] : c.services)
    for (const auto& config : service.configs)
      for (const auto& node : config.nodes)
        CHECK((node == "f1" || node == "f2" || node == "f3"));

  // forecaster quality levels can serve every menu target up to 0.95
  CHECK(c.functions.at("f1").max_complexity().q_base >= 0.95);

  // the whole testbed deploys outright
  auto plan = solve(c, DeploymentState{}, EngineParams{});
  CHECK(plan.assignment.selected.size() == 3);
  CHECK(check_feasibility(plan.assignment, DeploymentState{}, c).feasible());
}

TEST_CASE("epoch schedule: departures follow arrivals by one lifetime") {
  Catalog c = generate_scenario(ScenarioParams::for_scale("M", 5));
  auto seq = make_epoch_sequence(c, 4, 2, 5);

  std::map<std::string, int> arrival;
  for (int e = 0; e < 4; ++e)
    for (const auto& sid : seq.arrivals[e]) arrival[sid] = e;
  CHECK(arrival.size() == c.services.size());

  for (int e = 0; e < 4; ++e) {
    for (const auto& sid : seq.active(e)) {
      CHECK(arrival.at(sid) <= e);
      CHECK(e < arrival.at(sid) + 2);
    }
    for (const auto& sid : seq.departures(e)) CHECK(arrival.at(sid) == e - 2);
  }
}

TEST_CASE("an empty epoch produces a zero-metric report") {
  Catalog empty = restrict_catalog(generate_scenario(ScenarioParams::for_scale("S", 1)), {});
  RunReport r = report_from_assignment(empty, Assignment{});
  CHECK(r.active_services == 0);
  CHECK(r.deployed_fraction == 0.0);
  CHECK(r.priority_sum == 0.0);
  CHECK(r.xapp_count == 0);
  CHECK(r.objective == 0.0);
  CHECK_FALSE(r.has_norms);
}

TEST_CASE("every committed epoch plan passes the independent checker") {
  RunParams params;
  params.scale = "S";
  params.runs = 2;
  params.epochs = 3;
  params.seed = 50;
  params.policies = {"oreo", "baseline"};

  std::vector<EpochOutcome> details;
  auto reports = run_experiment(params, &details);
  CHECK(reports.size() == 2 * 3 * 2);
  REQUIRE(details.size() == reports.size());
  for (const auto& d : details) {
    auto report = check_feasibility(d.committed, d.state_before, d.view);
    CAPTURE(d.policy);
    CAPTURE(d.seed);
    CAPTURE(d.epoch);
    CHECK(report.feasible());
  }
}

TEST_CASE("run_experiment output is deterministic") {
  RunParams params;
  params.scale = "S";
  params.runs = 2;
  params.epochs = 2;
  params.seed = 9;
  auto csv1 = reports_to_csv(run_experiment(params));
  auto csv2 = reports_to_csv(run_experiment(params));
  CHECK(csv1 == csv2);
}

TEST_CASE("results CSV round-trips") {
  RunParams params;
  params.scale = "S";
  params.runs = 1;
  params.epochs = 2;
  params.seed = 123;
  params.policies = {"oreo", "exact", "baseline"};
  params.oracle.max_nodes = 50;  // provoke at least one exceeded row
  auto reports = run_experiment(params);
  auto csv = reports_to_csv(reports);
  auto parsed = reports_from_csv(csv);
  CHECK(reports_to_csv(parsed) == csv);
}

TEST_CASE("summarize computes means and 90% confidence intervals") {
  std::vector<RunReport> reports;
  for (double v : {0.8, 0.9, 1.0}) {
    RunReport r;
    r.scenario = "S";
    r.policy = "oreo";
    r.objective = v;
    r.stop_reason = "GAP";
    reports.push_back(r);
  }
  auto rows = summarize(reports);
  const SummaryRow* obj = nullptr;
  for (const auto& row : rows)
    if (row.metric == "objective") obj = &row;
  REQUIRE(obj);
  CHECK(obj->n == 3);
  CHECK(obj->mean == doctest::Approx(0.9));
  double half = 1.6448536269514722 * 0.1 / std::sqrt(3.0);  // sd of {0.8,0.9,1.0} is 0.1
  CHECK(obj->ci90_hi - obj->mean == doctest::Approx(half).epsilon(1e-9));
}

TEST_CASE("summarize: identical samples have zero-width intervals") {
  std::vector<RunReport> reports;
  for (int i = 0; i < 4; ++i) {
    RunReport r;
    r.scenario = "S";
    r.policy = "baseline";
    r.objective = 2.5;
    reports.push_back(r);
  }
  auto rows = summarize(reports);
  for (const auto& row : rows)
    if (row.metric == "objective") {
      CHECK(row.ci90_lo == doctest::Approx(row.ci90_hi));
      CHECK(row.mean == doctest::Approx(2.5));
    }
}

TEST_CASE("approximation ratio appears only when the oracle completed") {
  std::vector<RunReport> reports;
  auto mk = [](const char* policy, double obj, bool exceeded, int epoch) {
    RunReport r;
    r.scenario = "S";
    r.policy = policy;
    r.seed = 1;
    r.epoch = epoch;
    r.objective = obj;
    r.exceeded = exceeded;
    return r;
  };
  reports.push_back(mk("oreo", 0.9, false, 0));
  reports.push_back(mk("exact", 1.0, false, 0));
  reports.push_back(mk("oreo", 0.5, false, 1));
  reports.push_back(mk("exact", 0.0, true, 1));  // exceeded epoch: no ratio

  auto rows = summarize(reports);
  const SummaryRow* ratio = nullptr;
  for (const auto& row : rows)
    if (row.policy == "oreo" && row.metric == "approx_ratio") ratio = &row;
  REQUIRE(ratio);
  CHECK(ratio->n == 1);
  CHECK(ratio->mean == doctest::Approx(0.9));
}

TEST_CASE("summarize of an all-exceeded oracle column emits no ratio rows") {
  std::vector<RunReport> reports;
  RunReport oreo_row;
  oreo_row.scenario = "L";
  oreo_row.policy = "oreo";
  oreo_row.objective = 1.0;
  reports.push_back(oreo_row);
  RunReport exact_row;
  exact_row.scenario = "L";
  exact_row.policy = "exact";
  exact_row.exceeded = true;
  reports.push_back(exact_row);

  for (const auto& row : summarize(reports)) CHECK(row.metric != "approx_ratio");
}
