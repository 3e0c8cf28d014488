// Iterative orchestration loop: alternate the Lagrangian relaxation (LR1 and
// LR2 run concurrently), feasibility repair, bound bookkeeping, and
// subgradient multiplier updates until a stopping criterion fires.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oreo/lagrangian.hpp"
#include "oreo/repair.hpp"

namespace oreo {

struct EngineParams {
  double gap_threshold = 1e-3;  // Delta: relative UB-LB gap
  double step_floor = 1e-3;     // Gamma: minimum step-size coefficient
  int max_iterations = 300;     // Lambda
  int halving_window = 5;       // N
  double mu0 = 2.0;
  std::uint64_t seed = 0;  // reserved for seeded variants; the loop itself is deterministic
};

enum class StopReason { kGap, kStepFloor, kMaxIter, kZeroSubgradient };
const char* to_string(StopReason reason);

struct IterationRecord {
  int iteration = 0;
  double upper_bound = 0.0;    // certified dual bound at this iteration
  double relaxed_value = 0.0;  // Psi_L evaluated at the relaxed point
  double best_feasible = 0.0;
  double mu = 0.0;
  double subgradient_norm = 0.0;
};

struct OrchestrationPlan {
  Assignment assignment;      // best feasible assignment found
  double objective = 0.0;     // its Psi (the lower bound)
  double upper_bound = 0.0;   // min certified Psi_L across iterations
  int iterations = 0;
  StopReason stop_reason = StopReason::kGap;
  std::vector<IterationRecord> trace;
};

// Requires a catalog that validates clean; throws std::invalid_argument
// otherwise.
OrchestrationPlan solve(const Catalog& catalog, const DeploymentState& state,
                        const EngineParams& params);

}  // namespace oreo
