// Four-stage feasibility repair: accept the relaxed configuration choice,
// complete the xApp selection (sharing when cheaper), tune complexity levels
// for quality, raise CPU for latency, then drop services until the budget
// and transition constraints hold.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "oreo/lagrangian.hpp"
#include "oreo/ric_state.hpp"

namespace oreo {

struct RepairAction {
  std::string stage;   // "selection", "quality", "latency", "budget"
  std::string action;  // e.g. "new-instance", "share", "raise-complexity", "drop-service"
  std::string entity;
  double before = 0.0;
  double after = 0.0;
};

struct RepairTrace {
  std::vector<RepairAction> actions;
};

// Stage 1: cover every function of every selected configuration. An existing
// instance is shared when the CPU delta restoring its latency under the extra
// load costs less than a fresh replica's CPU + storage.
Assignment xapp_selection(const RelaxedSolution& relaxed, const DeploymentState& state,
                          const Catalog& catalog, RepairTrace* trace);

// Stage 2: raise complexity by highest quality efficiency until every
// selected configuration meets its quality target (services that cannot meet
// it even at maximal complexity are dropped), then try complexity reductions
// that keep every sharing service compliant.
Assignment service_quality_adjustment(const Assignment& assignment, const Catalog& catalog,
                                      RepairTrace* trace);

// Stage 3: while a selected configuration misses its latency target, raise
// the CPU of the critical-path xApp needing the smallest increase to reach
// the equal-split per-node target; shared instances are sized for their most
// demanding sharer.
Assignment service_latency_adjustment(const Assignment& assignment, const Catalog& catalog,
                                      RepairTrace* trace);

// Stage 4: drop lowest-priority / costliest services until the budget and
// transition constraints hold; prune unused instances and resize survivors
// for the reduced load.
Assignment budget_enforcement(const Assignment& assignment, const DeploymentState& state,
                              const Catalog& catalog, RepairTrace* trace,
                              std::vector<std::string>* dropped);

// Joint continuous CPU re-sizing for a repaired skeleton (used between the
// latency and budget stages; replaces per-node equal splits with the minimal
// feasible allocation).
Assignment right_size_cpu(const Assignment& assignment, const DeploymentState& state,
                          const Catalog& catalog);

// All four stages in order. The result always passes check_feasibility.
std::pair<Assignment, RepairTrace> repair(const RelaxedSolution& relaxed,
                                          const DeploymentState& state, const Catalog& catalog);

// Equal-split per-node latency target for one service configuration.
double node_latency_target(const ServiceSpec& service, const ConfigGraph& config);

}  // namespace oreo
