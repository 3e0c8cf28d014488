#include "oreo/performance.hpp"

#include <algorithm>
#include <stdexcept>

namespace oreo {

double xapp_latency(double rho_cpu, double theta, double lambda_total) {
  double capacity = rho_cpu * theta;
  if (capacity <= lambda_total * (1.0 + kStabilityMargin) || capacity <= 0.0)
    throw std::domain_error("unstable queue: capacity " + std::to_string(capacity) +
                            " units/s does not exceed load " + std::to_string(lambda_total));
  return 1.0 / (capacity - lambda_total);
}

double xapp_latency_or_cap(double rho_cpu, double theta, double lambda_total, double cap) {
  double capacity = rho_cpu * theta;
  if (capacity <= lambda_total * (1.0 + kStabilityMargin) || capacity <= 0.0) return cap;
  return std::min(cap, 1.0 / (capacity - lambda_total));
}

double required_cpu(double theta, double lambda_total, double target_latency) {
  if (target_latency <= 0.0) throw std::invalid_argument("target latency must be > 0");
  return (lambda_total + 1.0 / target_latency) / theta;
}

QualityResult config_quality(const ConfigGraph& config,
                             const std::map<std::string, const XAppSpec*>& chosen) {
  for (const auto& n : config.nodes) {
    auto it = chosen.find(n);
    if (it == chosen.end() || it->second == nullptr)
      throw std::invalid_argument("uncovered function '" + n + "' in configuration '" +
                                  config.id + "'");
  }

  std::map<std::string, std::vector<std::string>> preds;
  std::map<std::string, bool> has_succ;
  for (const auto& n : config.nodes) {
    preds[n];
    has_succ[n] = false;
  }
  for (const auto& [from, to] : config.edges) {
    preds[to].push_back(from);
    has_succ[from] = true;
  }

  QualityResult res;
  for (const auto& n : topological_order(config)) {
    double input = 1.0;
    for (const auto& p : preds[n]) input = std::min(input, res.node_quality.at(p));
    res.node_quality[n] = chosen.at(n)->q_base * input;
  }

  res.sink_quality = 1.0;
  for (const auto& n : config.nodes)
    if (!has_succ[n]) res.sink_quality = std::min(res.sink_quality, res.node_quality.at(n));
  return res;
}

double service_latency(const ConfigGraph& config,
                       const std::map<std::string, double>& instance_latency) {
  double worst = 0.0;
  for (const auto& path : enumerate_paths(config)) {
    double total = 0.0;
    for (const auto& n : path) {
      auto it = instance_latency.find(n);
      if (it == instance_latency.end())
        throw std::invalid_argument("missing latency for function '" + n + "'");
      total += it->second;
    }
    worst = std::max(worst, total);
  }
  return worst;
}

}  // namespace oreo
