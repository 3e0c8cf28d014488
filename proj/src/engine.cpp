#include "oreo/engine.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

namespace oreo {

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kGap: return "GAP";
    case StopReason::kStepFloor: return "STEP_FLOOR";
    case StopReason::kMaxIter: return "MAX_ITER";
    case StopReason::kZeroSubgradient: return "ZERO_SUBGRADIENT";
  }
  return "?";
}

OrchestrationPlan solve(const Catalog& catalog, const DeploymentState& state,
                        const EngineParams& params) {
  if (auto violations = validate_catalog(catalog); !violations.empty())
    throw std::invalid_argument("invalid catalog: " + violations.front().code + " (" +
                                violations.front().entity + ")");

  OrchestrationPlan plan;
  Multipliers multipliers;
  StepSchedule schedule;
  schedule.mu = params.mu0;
  schedule.halving_window = params.halving_window;

  // The empty assignment is always feasible; start from it.
  double lower_bound = 0.0;
  double upper_bound = std::numeric_limits<double>::infinity();
  plan.assignment = Assignment{};

  for (int it = 1; it <= params.max_iterations; ++it) {
    plan.iterations = it;

    // LR1 and LR2 are independent; solve them concurrently.
    auto lr1_future = std::async(std::launch::async, solve_lr1, std::cref(multipliers),
                                 std::cref(catalog));
    Lr2Result lr2 = solve_lr2(multipliers, state, catalog);
    Lr1Result lr1 = lr1_future.get();

    RelaxedSolution relaxed;
    relaxed.point.selected = lr1.selected;
    relaxed.point.uses = lr2.uses;
    relaxed.point.rho = lr2.rho;
    auto value = lagrangian_value(relaxed.point, multipliers, catalog);
    relaxed.lagrangian_value = value.total;
    relaxed.psi_l1 = value.part1;
    relaxed.psi_l2 = value.part2;
    relaxed.dual_bound = lr1.value + lr2.bound;

    upper_bound = std::min(upper_bound, relaxed.dual_bound);

    auto [repaired, trace_unused] = repair(relaxed, state, catalog);
    double feasible_value = objective(repaired, catalog);
    if (feasible_value > lower_bound + 1e-12 * std::max(1.0, std::abs(lower_bound))) {
      lower_bound = feasible_value;
      plan.assignment = repaired;
    }

    auto grads = subgradients(relaxed, catalog);
    double gnorm = std::sqrt(grads.squared_norm());

    plan.trace.push_back({it, relaxed.dual_bound, relaxed.lagrangian_value, lower_bound,
                          schedule.mu, gnorm});

    double gap = (upper_bound - lower_bound) / std::max(std::abs(upper_bound), 1e-12);
    if (gap < params.gap_threshold) {
      plan.stop_reason = StopReason::kGap;
      break;
    }
    if (gnorm == 0.0) {
      plan.stop_reason = StopReason::kZeroSubgradient;
      break;
    }
    update_multipliers(multipliers, grads, schedule, relaxed.dual_bound, lower_bound);
    if (schedule.mu < params.step_floor) {
      plan.stop_reason = StopReason::kStepFloor;
      break;
    }
    if (it == params.max_iterations) plan.stop_reason = StopReason::kMaxIter;
  }

  plan.objective = lower_bound;
  plan.upper_bound = std::isfinite(upper_bound) ? upper_bound : 0.0;
  return plan;
}

}  // namespace oreo
