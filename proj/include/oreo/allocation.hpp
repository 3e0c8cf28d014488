// Continuous CPU sizing for a fixed discrete skeleton: minimal total CPU
// subject to every path latency constraint, queue stability, and the
// transition capacity implied by the deployment state.
#pragma once

#include <map>

#include "oreo/ric_state.hpp"

namespace oreo {

struct MinCpuResult {
  std::map<InstanceId, double> cpu;
  bool feasible = false;  // false only when the transition cap cannot be met
};

// `skeleton` fixes the selected configurations and the instance grouping in
// `uses`; storage is not decided here. Solved in node-latency space by capped
// water-filling sweeps with single-coordinate polish; a violated transition
// cap is rebalanced by bisecting a penalty weight on transition-side
// instances.
MinCpuResult min_cpu_allocation(const Assignment& skeleton, const DeploymentState& state,
                                const Catalog& catalog);

}  // namespace oreo
