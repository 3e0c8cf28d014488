// Full decision triples (z, v, rho), the deployment state carried between
// request epochs, the objective, and the independent checker for every
// constraint family including the no-disruption transition rule.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oreo/catalog.hpp"
#include "oreo/performance.hpp"

namespace oreo {

struct ConfigKey {
  std::string service;
  std::string config;
  auto operator<=>(const ConfigKey&) const = default;
  std::string str() const { return service + "/" + config; }
};

// A complete decision triple. Deliberately permissive: invalid states are
// representable so the checker can describe them.
struct Assignment {
  std::set<ConfigKey> selected;                      // z_{c_s} = 1
  std::set<std::pair<ConfigKey, InstanceId>> uses;   // v_{c_s, f_chi^(j)} = 1
  std::map<InstanceId, ResourceVector> rho;

  bool empty() const { return selected.empty() && uses.empty() && rho.empty(); }

  std::optional<std::string> selected_config(const std::string& service_id) const {
    for (const auto& key : selected)
      if (key.service == service_id) return key.config;
    return std::nullopt;
  }

  // Instances referenced by `key`, one entry per covered function.
  std::vector<InstanceId> instances_for(const ConfigKey& key) const {
    std::vector<InstanceId> out;
    for (const auto& [k, inst] : uses)
      if (k == key) out.push_back(inst);
    return out;
  }
};

// Near-RT RIC settings between epochs: the committed assignment and the
// services whose operation must not be disrupted by the next solve.
struct DeploymentState {
  Assignment previous;
  std::set<std::string> protected_services;

  bool empty() const { return previous.empty() && protected_services.empty(); }
};

enum class ConstraintTag {
  kCfgUnique,   // at most one configuration per service
  kFuncCover,   // exactly one instance per (selected config, function)
  kFuncForeign, // no instance attached outside the configuration's node set
  kStorage,     // deployed instances hold at least their mem/disk footprint
  kQuality,     // q_{c_s} >= Q_s for the selected configuration
  kLatency,     // tau_{c_s} <= T_s for the selected configuration
  kBudget,      // summed allocations within the budget, per resource
  kTransition,  // old and new allocations co-exist within the budget
};

const char* to_string(ConstraintTag tag);

struct Violation {
  ConstraintTag tag;
  std::string entity;
  double slack = 0.0;  // positive = violated amount
};

struct ViolationReport {
  std::vector<Violation> items;
  bool feasible() const { return items.empty(); }
};

// Objective Psi = sum of deployed priorities minus the mean budget fraction
// consumed across resource types.
double objective(const Assignment& assignment, const Catalog& catalog);

// Total input rate of the service configurations sharing `instance`
// (selected configurations only).
double aggregate_load(const InstanceId& instance, const Assignment& assignment,
                      const Catalog& catalog);

// Instance latencies under `assignment`, saturated at `cap` for unstable or
// unallocated queues.
std::map<InstanceId, double> instance_latencies(const Assignment& assignment,
                                                const Catalog& catalog, double cap);

// Quality and worst-path latency of one selected configuration, evaluated on
// the instances the assignment attaches to it. Returns nothing when coverage
// is broken (those violations are reported separately).
struct ConfigPerformance {
  double quality = 0.0;
  double latency = 0.0;
};
std::optional<ConfigPerformance> evaluate_config(const ConfigKey& key,
                                                 const Assignment& assignment,
                                                 const Catalog& catalog, double latency_cap);

// Instances that must stay alive for continuing services (F1: under the
// previous assignment; F2: under the new one).
std::pair<std::set<InstanceId>, std::set<InstanceId>> transition_sets(
    const DeploymentState& state, const Assignment& new_assignment);

// Eq-style transition capacity check: old allocations of F1\F2 plus new
// allocations of F2 must fit the budget for every resource type.
std::vector<Violation> transition_budget_check(const std::set<InstanceId>& f1,
                                               const std::set<InstanceId>& f2,
                                               const DeploymentState& state,
                                               const Assignment& new_assignment,
                                               const Catalog& catalog);

// Every constraint family, each violation carrying its signed slack.
ViolationReport check_feasibility(const Assignment& assignment, const DeploymentState& state,
                                  const Catalog& catalog);

// Renames replica indices deterministically and lets instances serving a
// protected service adopt the ids of the previous epoch's instances of the
// same (function, chi), largest prior allocation first. Keeps the transition
// constraint from double-counting continuing workloads.
Assignment canonicalize_replicas(const Assignment& assignment, const DeploymentState& state,
                                 const Catalog& catalog);

}  // namespace oreo
