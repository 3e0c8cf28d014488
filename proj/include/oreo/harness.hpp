// Experiment harness: dynamic request replay over epochs, per-policy state
// lineages, metric reports, CSV output and aggregation.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oreo/baseline.hpp"
#include "oreo/engine.hpp"
#include "oreo/oracle.hpp"
#include "oreo/scenario.hpp"

namespace oreo {

struct RunParams {
  std::string scale = "S";
  int runs = 1;
  int epochs = 3;
  int lifetime = 2;  // epochs a service stays active
  std::uint64_t seed = 1;
  std::vector<std::string> policies = {"oreo", "baseline"};  // oreo | exact | baseline
  EngineParams engine;
  OracleLimits oracle;
  // wall_time_ms is written as 0 unless enabled, keeping CSV output
  // byte-identical across runs
  bool measure_time = false;
};

struct RunReport {
  std::string scenario;
  std::string policy;
  std::uint64_t seed = 0;
  int epoch = 0;
  int active_services = 0;
  int deployed_services = 0;
  double deployed_fraction = 0.0;
  double priority_sum = 0.0;
  int xapp_count = 0;
  double cpu_util = 0.0;
  double mem_util = 0.0;
  double disk_util = 0.0;
  double objective = 0.0;
  double upper_bound = 0.0;
  bool has_upper_bound = false;
  double mean_norm_latency = 0.0;
  double mean_norm_quality = 0.0;
  bool has_norms = false;
  double wall_time_ms = 0.0;
  std::string stop_reason;
  bool exceeded = false;  // oracle limits tripped; metrics absent
};

// One committed decision, retained for independent re-checking.
struct EpochOutcome {
  std::string policy;
  std::uint64_t seed = 0;
  int epoch = 0;
  Catalog view;               // catalog restricted to the epoch's active services
  DeploymentState state_before;
  Assignment committed;
  bool exceeded = false;
};

// Catalog restricted to a subset of services (functions and budget shared).
Catalog restrict_catalog(const Catalog& catalog, const std::vector<std::string>& service_ids);

RunReport report_from_assignment(const Catalog& view, const Assignment& assignment);

// Replays the epoch schedule for every (seed, policy) lineage. Per epoch the
// active set is continuing plus arriving services; each policy owns its state
// lineage and its plans feed the next epoch's transition constraint.
std::vector<RunReport> run_experiment(const RunParams& params,
                                      std::vector<EpochOutcome>* details = nullptr);

// results.csv format used by `run` and read by `compare`.
std::string reports_to_csv(const std::vector<RunReport>& reports);
std::vector<RunReport> reports_from_csv(const std::string& csv);

struct SummaryRow {
  std::string scenario;
  std::string policy;
  std::string metric;
  int n = 0;
  double mean = 0.0;
  double ci90_lo = 0.0;
  double ci90_hi = 0.0;
};

// Per (scenario, policy, metric): mean and normal-approximation 90%
// confidence interval. Approximation ratios are paired against the exact
// policy and computed only where it completed.
std::vector<SummaryRow> summarize(const std::vector<RunReport>& reports);

std::string summary_to_csv(const std::vector<SummaryRow>& rows);

}  // namespace oreo
