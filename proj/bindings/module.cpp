// Python module exposing the main operations. Structured data crosses the
// boundary as JSON text; the python package wraps it into dicts.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oreo/harness.hpp"
#include "oreo/json_io.hpp"

namespace py = pybind11;

namespace {

oreo::Catalog parse_catalog(const std::string& text) {
  return oreo::catalog_from_json(oreo::Json::parse(text));
}

oreo::DeploymentState parse_state(const std::string& text) {
  if (text.empty()) return {};
  return oreo::state_from_json(oreo::Json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Orchestration engine for shareable, complexity-tunable xApp services";

  m.def(
      "generate_scenario",
      [](const std::string& scale, std::uint64_t seed) {
        return oreo::catalog_to_json(
                   oreo::generate_scenario(oreo::ScenarioParams::for_scale(scale, seed)))
            .dump();
      },
      py::arg("scale"), py::arg("seed"));

  m.def("testbed_scenario",
        [] { return oreo::catalog_to_json(oreo::canned_testbed_scenario()).dump(); });

  m.def(
      "validate_catalog",
      [](const std::string& catalog_json) {
        return oreo::catalog_violations_to_json(oreo::validate_catalog(parse_catalog(catalog_json)))
            .dump();
      },
      py::arg("catalog"));

  m.def(
      "solve",
      [](const std::string& catalog_json, const std::string& policy, const std::string& state_json,
         double delta, double gamma, int lambda_max, int halving_n, double mu0,
         std::int64_t oracle_max_nodes, double oracle_time_budget) {
        oreo::Catalog catalog = parse_catalog(catalog_json);
        oreo::DeploymentState state = parse_state(state_json);
        oreo::Json out;
        if (policy == "oreo") {
          oreo::EngineParams params;
          params.gap_threshold = delta;
          params.step_floor = gamma;
          params.max_iterations = lambda_max;
          params.halving_window = halving_n;
          params.mu0 = mu0;
          out = oreo::plan_to_json(oreo::solve(catalog, state, params));
        } else if (policy == "exact") {
          oreo::OracleLimits limits{oracle_max_nodes, oracle_time_budget};
          auto outcome = oreo::solve_exact(catalog, state, limits);
          if (outcome.exceeded)
            out = oreo::Json{{"status", "exceeded"}, {"nodes_used", outcome.nodes_used}};
          else
            out = oreo::plan_to_json(outcome.plan);
        } else if (policy == "baseline") {
          out = oreo::plan_to_json(oreo::solve_baseline(catalog, state));
        } else {
          throw std::invalid_argument("unknown policy '" + policy + "'");
        }
        out["policy"] = policy;
        return out.dump();
      },
      py::arg("catalog"), py::arg("policy") = "oreo", py::arg("state") = "",
      py::arg("delta") = 1e-3, py::arg("gamma") = 1e-3, py::arg("lambda_max") = 300,
      py::arg("halving_n") = 5, py::arg("mu0") = 2.0,
      py::arg("oracle_max_nodes") = std::int64_t{10'000'000},
      py::arg("oracle_time_budget") = 30.0);

  m.def(
      "check_feasibility",
      [](const std::string& catalog_json, const std::string& assignment_json,
         const std::string& state_json) {
        return oreo::violations_to_json(
                   oreo::check_feasibility(
                       oreo::assignment_from_json(oreo::Json::parse(assignment_json)),
                       parse_state(state_json), parse_catalog(catalog_json)))
            .dump();
      },
      py::arg("catalog"), py::arg("assignment"), py::arg("state") = "");

  m.def(
      "objective",
      [](const std::string& catalog_json, const std::string& assignment_json) {
        return oreo::objective(oreo::assignment_from_json(oreo::Json::parse(assignment_json)),
                               parse_catalog(catalog_json));
      },
      py::arg("catalog"), py::arg("assignment"));

  m.def(
      "run_experiment",
      [](const std::string& scale, int runs, int epochs, std::uint64_t seed,
         const std::vector<std::string>& policies, int lifetime) {
        oreo::RunParams params;
        params.scale = scale;
        params.runs = runs;
        params.epochs = epochs;
        params.seed = seed;
        params.policies = policies;
        params.lifetime = lifetime;
        return oreo::reports_to_csv(oreo::run_experiment(params));
      },
      py::arg("scale"), py::arg("runs") = 1, py::arg("epochs") = 3, py::arg("seed") = 1,
      py::arg("policies") = std::vector<std::string>{"oreo", "baseline"},
      py::arg("lifetime") = 2);

  m.def("xapp_latency", &oreo::xapp_latency, py::arg("rho_cpu"), py::arg("theta"),
        py::arg("lambda_total"));
  m.def("required_cpu", &oreo::required_cpu, py::arg("theta"), py::arg("lambda_total"),
        py::arg("target_latency"));
}
