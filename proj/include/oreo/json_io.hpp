// JSON (de)serialization for the documented file formats: scenario files,
// assignments, deployment state, plans, violation reports and repair traces.
#pragma once

#include <json.hpp>

#include "oreo/engine.hpp"
#include "oreo/repair.hpp"
#include "oreo/ric_state.hpp"

namespace oreo {

using Json = nlohmann::ordered_json;

Json catalog_to_json(const Catalog& catalog);
Catalog catalog_from_json(const Json& j);

Json assignment_to_json(const Assignment& assignment);
Assignment assignment_from_json(const Json& j);

Json state_to_json(const DeploymentState& state);
DeploymentState state_from_json(const Json& j);

Json violations_to_json(const ViolationReport& report);
Json catalog_violations_to_json(const std::vector<CatalogViolation>& violations);
Json trace_to_json(const RepairTrace& trace);
Json plan_to_json(const OrchestrationPlan& plan);

}  // namespace oreo
