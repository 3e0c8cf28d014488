// Monolithic comparison policy: every (configuration, complexity vector)
// combination is a distinct monolith with a fixed, service-exclusive resource
// allocation; no sharing, no resizing.
#pragma once

#include "oreo/engine.hpp"
#include "oreo/ric_state.hpp"

namespace oreo {

// Deploys services in descending priority order, each with its
// highest-quality candidate that fits the remaining budget and transition
// capacity; services whose candidates do not fit are skipped.
OrchestrationPlan solve_baseline(const Catalog& catalog, const DeploymentState& state);

}  // namespace oreo
