// Command line front end: scenario generation, single-instance solving,
// batched experiment runs, and result aggregation.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "oreo/harness.hpp"
#include "oreo/json_io.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xApp orchestration testbench: shared, complexity-tunable RAN functions"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "Generate a scenario file");
  std::string gen_scale = "S";
  std::uint64_t gen_seed = 1;
  std::string gen_out = "scenario.json";
  bool gen_testbed = false;
  gen->add_option("--scale", gen_scale, "S, M, L or XL");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output file")->required();
  gen->add_flag("--testbed", gen_testbed, "emit the canned three-service testbed catalog");

  // ---- solve ----
  auto* solve_cmd = app.add_subcommand("solve", "Solve one scenario with one policy");
  std::string solve_scenario, solve_policy = "oreo", solve_state, solve_out;
  bool solve_explain = false;
  oreo::EngineParams engine;
  oreo::OracleLimits oracle_limits;
  solve_cmd->add_option("--scenario", solve_scenario, "scenario JSON file")->required();
  solve_cmd->add_option("--policy", solve_policy, "oreo | exact | baseline");
  solve_cmd->add_option("--state", solve_state, "deployment state JSON file");
  solve_cmd->add_option("--out", solve_out, "write the plan JSON here instead of stdout");
  solve_cmd->add_flag("--explain", solve_explain,
                      "include the violation report and repair trace");
  solve_cmd->add_option("--delta", engine.gap_threshold, "relative gap threshold");
  solve_cmd->add_option("--gamma", engine.step_floor, "step-size floor");
  solve_cmd->add_option("--lambda", engine.max_iterations, "maximum iterations");
  solve_cmd->add_option("--halving-n", engine.halving_window, "halving window");
  solve_cmd->add_option("--mu0", engine.mu0, "initial step coefficient");
  solve_cmd->add_option("--oracle-max-nodes", oracle_limits.max_nodes,
                        "exact policy enumeration limit");
  solve_cmd->add_option("--oracle-time-budget", oracle_limits.time_budget,
                        "exact policy time budget (s)");

  // ---- run ----
  auto* run_cmd = app.add_subcommand("run", "Replay epochs over seeded scenarios");
  oreo::RunParams run_params;
  std::string run_policies = "oreo,baseline";
  std::string run_out = "runs";
  run_cmd->add_option("--scale", run_params.scale, "S, M, L or XL");
  run_cmd->add_option("--runs", run_params.runs, "number of seeded runs");
  run_cmd->add_option("--epochs", run_params.epochs, "request epochs per run");
  run_cmd->add_option("--seed", run_params.seed, "base seed");
  run_cmd->add_option("--lifetime", run_params.lifetime, "service lifetime in epochs");
  run_cmd->add_option("--policies", run_policies, "comma separated policy list");
  run_cmd->add_option("--out", run_out, "output directory");
  run_cmd->add_flag("--timings", run_params.measure_time,
                    "record wall times (makes the CSV non-reproducible)");
  run_cmd->add_option("--delta", run_params.engine.gap_threshold, "relative gap threshold");
  run_cmd->add_option("--gamma", run_params.engine.step_floor, "step-size floor");
  run_cmd->add_option("--lambda", run_params.engine.max_iterations, "maximum iterations");
  run_cmd->add_option("--halving-n", run_params.engine.halving_window, "halving window");
  run_cmd->add_option("--mu0", run_params.engine.mu0, "initial step coefficient");
  run_cmd->add_option("--oracle-max-nodes", run_params.oracle.max_nodes,
                      "exact policy enumeration limit");
  run_cmd->add_option("--oracle-time-budget", run_params.oracle.time_budget,
                      "exact policy time budget (s)");

  // ---- compare ----
  auto* cmp = app.add_subcommand("compare", "Aggregate result CSVs into a summary table");
  std::string cmp_in, cmp_out;
  cmp->add_option("--in", cmp_in, "directory holding results CSV files")->required();
  cmp->add_option("--out", cmp_out, "summary CSV file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      oreo::Catalog catalog =
          gen_testbed ? oreo::canned_testbed_scenario()
                      : oreo::generate_scenario(oreo::ScenarioParams::for_scale(gen_scale, gen_seed));
      write_file(gen_out, oreo::catalog_to_json(catalog).dump(2) + "\n");
      std::cout << "wrote " << gen_out << " (" << catalog.services.size() << " services, "
                << catalog.functions.size() << " functions)\n";
    } else if (*solve_cmd) {
      oreo::Catalog catalog =
          oreo::catalog_from_json(oreo::Json::parse(read_file(solve_scenario)));
      if (auto issues = oreo::validate_catalog(catalog); !issues.empty()) {
        std::cerr << "scenario is invalid:\n"
                  << oreo::catalog_violations_to_json(issues).dump(2) << "\n";
        return 1;
      }
      oreo::DeploymentState state;
      if (!solve_state.empty())
        state = oreo::state_from_json(oreo::Json::parse(read_file(solve_state)));

      oreo::Json out;
      if (solve_policy == "oreo") {
        auto plan = oreo::solve(catalog, state, engine);
        out = oreo::plan_to_json(plan);
        if (solve_explain) {
          out["violations"] =
              oreo::violations_to_json(oreo::check_feasibility(plan.assignment, state, catalog));
          oreo::Multipliers zero;
          oreo::RelaxedSolution seed_point;  // repair of the empty relaxation, for inspection
          auto [repaired, trace] = oreo::repair(seed_point, state, catalog);
          (void)repaired;
          out["repair_trace"] = oreo::trace_to_json(trace);
        }
      } else if (solve_policy == "exact") {
        auto outcome = oreo::solve_exact(catalog, state, oracle_limits);
        if (outcome.exceeded) {
          out = oreo::Json{{"status", "exceeded"}, {"nodes_used", outcome.nodes_used}};
        } else {
          out = oreo::plan_to_json(outcome.plan);
          out["nodes_used"] = outcome.nodes_used;
        }
      } else if (solve_policy == "baseline") {
        auto plan = oreo::solve_baseline(catalog, state);
        out = oreo::plan_to_json(plan);
        if (solve_explain)
          out["violations"] =
              oreo::violations_to_json(oreo::check_feasibility(plan.assignment, state, catalog));
      } else {
        std::cerr << "unknown policy '" << solve_policy << "'\n";
        return 1;
      }
      out["policy"] = solve_policy;
      if (solve_out.empty())
        std::cout << out.dump(2) << "\n";
      else
        write_file(solve_out, out.dump(2) + "\n");
    } else if (*run_cmd) {
      run_params.policies.clear();
      std::istringstream ps(run_policies);
      std::string p;
      while (std::getline(ps, p, ','))
        if (!p.empty()) run_params.policies.push_back(p);
      auto reports = oreo::run_experiment(run_params);
      write_file((fs::path(run_out) / "results.csv").string(), oreo::reports_to_csv(reports));
      std::cout << "wrote " << (fs::path(run_out) / "results.csv").string() << " ("
                << reports.size() << " rows)\n";
    } else if (*cmp) {
      std::vector<oreo::RunReport> all;
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(cmp_in))
        if (entry.path().extension() == ".csv") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const auto& file : files) {
        auto part = oreo::reports_from_csv(read_file(file.string()));
        all.insert(all.end(), part.begin(), part.end());
      }
      write_file(cmp_out, oreo::summary_to_csv(oreo::summarize(all)));
      std::cout << "wrote " << cmp_out << " (" << all.size() << " reports)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
