// Quality and latency physics: M/M/1 instance latency, load aggregation
// under sharing, quality propagation through a configuration DAG, and
// worst-path service latency. All operations are pure.
#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "oreo/catalog.hpp"

namespace oreo {

// The j-th running replica of the xApp implementing `function_id` at
// complexity `chi`.
struct InstanceId {
  std::string function_id;
  int chi = 1;
  int replica = 0;

  auto operator<=>(const InstanceId&) const = default;
  std::string str() const {
    return function_id + ":" + std::to_string(chi) + "#" + std::to_string(replica);
  }
};

struct InstanceAllocation {
  InstanceId instance;
  ResourceVector rho;
};

// Mean M/M/1 sojourn time 1 / (rho_cpu * theta - lambda_total).
// Throws std::domain_error ("unstable queue") when the stability margin
// rho_cpu * theta > lambda_total is not met.
double xapp_latency(double rho_cpu, double theta, double lambda_total);

// Like xapp_latency but saturates: an unstable queue reports `cap` seconds
// instead of throwing. Used when evaluating arbitrary (possibly infeasible)
// allocations.
double xapp_latency_or_cap(double rho_cpu, double theta, double lambda_total, double cap);

// CPU making the instance latency exactly `target_latency`:
// (lambda_total + 1/target) / theta. Inverse of xapp_latency.
double required_cpu(double theta, double lambda_total, double target_latency);

// Per-node quality map plus the configuration quality q_{c_s}.
// In topological order each node produces q_base(f, chi) times the minimum
// of its predecessors' qualities; sources consume input of quality 1; with
// several sinks the configuration quality is the minimum over sinks.
struct QualityResult {
  std::map<std::string, double> node_quality;
  double sink_quality = 0.0;
};

// `chosen` must cover every node of the configuration exactly; throws
// std::invalid_argument naming the first uncovered function otherwise.
QualityResult config_quality(const ConfigGraph& config,
                             const std::map<std::string, const XAppSpec*>& chosen);

// Worst source-to-sink path latency (data collection is free). The map must
// cover every node.
double service_latency(const ConfigGraph& config,
                       const std::map<std::string, double>& instance_latency);

}  // namespace oreo
