// Ground-truth solver for small instances: exhaustive enumeration of
// configuration / complexity / sharing choices with admissible pruning, and
// an exact continuous CPU subproblem per discrete combination.
#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "oreo/allocation.hpp"
#include "oreo/engine.hpp"

namespace oreo {

struct OracleLimits {
  std::int64_t max_nodes = 10'000'000;  // enumeration nodes (options, leaves, partitions)
  double time_budget = 30.0;            // seconds; checked coarsely
};

struct OracleOutcome {
  bool exceeded = false;  // limits tripped; plan not meaningful
  OrchestrationPlan plan;
  std::int64_t nodes_used = 0;
};

OracleOutcome solve_exact(const Catalog& catalog, const DeploymentState& state,
                          const OracleLimits& limits);

}  // namespace oreo
