#include "oreo/json_io.hpp"

#include <algorithm>
#include <cmath>

namespace oreo {

namespace {

double clamp_finite(double v) {
  if (std::isnan(v)) return 0.0;
  if (std::isinf(v)) return v > 0 ? 1e300 : -1e300;
  return v;
}

Json instance_to_json(const InstanceId& inst) {
  return Json{{"function", inst.function_id}, {"chi", inst.chi}, {"replica", inst.replica}};
}

InstanceId instance_from_json(const Json& j) {
  return {j.at("function").get<std::string>(), j.at("chi").get<int>(),
          j.at("replica").get<int>()};
}

}  // namespace

Json catalog_to_json(const Catalog& catalog) {
  Json functions = Json::array();
  for (const auto& [fid, fn] : catalog.functions) {
    Json xapps = Json::array();
    for (const auto& x : fn.xapps)
      xapps.push_back(Json{{"chi", x.chi},
                           {"theta", x.theta},
                           {"q_base", x.q_base},
                           {"mem", x.mem_req},
                           {"disk", x.disk_req}});
    functions.push_back(Json{{"id", fid}, {"xapps", std::move(xapps)}});
  }
  Json services = Json::array();
  for (const auto& [sid, svc] : catalog.services) {
    Json configs = Json::array();
    for (const auto& cfg : svc.configs) {
      Json edges = Json::array();
      for (const auto& [from, to] : cfg.edges) edges.push_back(Json::array({from, to}));
      configs.push_back(Json{{"id", cfg.id}, {"nodes", cfg.nodes}, {"edges", std::move(edges)}});
    }
    services.push_back(Json{{"id", sid},
                            {"priority", svc.priority},
                            {"target_latency", svc.target_latency},
                            {"target_quality", svc.target_quality},
                            {"input_rate", svc.input_rate},
                            {"configs", std::move(configs)}});
  }
  return Json{{"functions", std::move(functions)},
              {"services", std::move(services)},
              {"budget",
               Json{{"cpu", catalog.budget.cpu}, {"mem", catalog.budget.mem},
                    {"disk", catalog.budget.disk}}},
              {"meta",
               Json{{"seed", catalog.meta.seed}, {"scale", catalog.meta.scale},
                    {"generator_version", catalog.meta.generator_version}}}};
}

Catalog catalog_from_json(const Json& j) {
  Catalog catalog;
  for (const auto& jf : j.at("functions")) {
    FunctionSpec fn;
    fn.id = jf.at("id").get<std::string>();
    for (const auto& jx : jf.at("xapps")) {
      XAppSpec x;
      x.function_id = fn.id;
      x.chi = jx.at("chi").get<int>();
      x.theta = jx.at("theta").get<double>();
      x.q_base = jx.at("q_base").get<double>();
      x.mem_req = jx.at("mem").get<double>();
      x.disk_req = jx.at("disk").get<double>();
      fn.xapps.push_back(x);
    }
    std::sort(fn.xapps.begin(), fn.xapps.end(),
              [](const XAppSpec& a, const XAppSpec& b) { return a.chi < b.chi; });
    catalog.functions[fn.id] = std::move(fn);
  }
  for (const auto& js : j.at("services")) {
    ServiceSpec svc;
    svc.id = js.at("id").get<std::string>();
    svc.priority = js.at("priority").get<double>();
    svc.target_latency = js.at("target_latency").get<double>();
    svc.target_quality = js.at("target_quality").get<double>();
    svc.input_rate = js.at("input_rate").get<double>();
    for (const auto& jc : js.at("configs")) {
      ConfigGraph cfg;
      cfg.id = jc.at("id").get<std::string>();
      for (const auto& n : jc.at("nodes")) cfg.nodes.push_back(n.get<std::string>());
      std::sort(cfg.nodes.begin(), cfg.nodes.end());
      for (const auto& je : jc.at("edges"))
        cfg.edges.push_back({je.at(0).get<std::string>(), je.at(1).get<std::string>()});
      std::sort(cfg.edges.begin(), cfg.edges.end());
      svc.configs.push_back(std::move(cfg));
    }
    catalog.services[svc.id] = std::move(svc);
  }
  const auto& jb = j.at("budget");
  catalog.budget = {jb.at("cpu").get<double>(), jb.at("mem").get<double>(),
                    jb.at("disk").get<double>()};
  if (j.contains("meta")) {
    const auto& jm = j.at("meta");
    catalog.meta.seed = jm.value("seed", std::uint64_t{0});
    catalog.meta.scale = jm.value("scale", std::string{});
    catalog.meta.generator_version = jm.value("generator_version", 1);
  }
  return catalog;
}

Json assignment_to_json(const Assignment& assignment) {
  Json selected = Json::array();
  for (const auto& key : assignment.selected)
    selected.push_back(Json{{"service", key.service}, {"config", key.config}});
  Json uses = Json::array();
  for (const auto& [key, inst] : assignment.uses)
    uses.push_back(Json{{"service", key.service},
                        {"config", key.config},
                        {"instance", instance_to_json(inst)}});
  Json rho = Json::array();
  for (const auto& [inst, r] : assignment.rho)
    rho.push_back(Json{{"instance", instance_to_json(inst)},
                       {"cpu", r.cpu},
                       {"mem", r.mem},
                       {"disk", r.disk}});
  return Json{{"selected", std::move(selected)}, {"uses", std::move(uses)},
              {"rho", std::move(rho)}};
}

Assignment assignment_from_json(const Json& j) {
  Assignment a;
  for (const auto& js : j.value("selected", Json::array()))
    a.selected.insert({js.at("service").get<std::string>(), js.at("config").get<std::string>()});
  for (const auto& ju : j.value("uses", Json::array()))
    a.uses.insert({{ju.at("service").get<std::string>(), ju.at("config").get<std::string>()},
                   instance_from_json(ju.at("instance"))});
  for (const auto& jr : j.value("rho", Json::array()))
    a.rho[instance_from_json(jr.at("instance"))] = {
        jr.at("cpu").get<double>(), jr.at("mem").get<double>(), jr.at("disk").get<double>()};
  return a;
}

Json state_to_json(const DeploymentState& state) {
  Json prot = Json::array();
  for (const auto& sid : state.protected_services) prot.push_back(sid);
  return Json{{"previous", assignment_to_json(state.previous)}, {"protected", std::move(prot)}};
}

DeploymentState state_from_json(const Json& j) {
  DeploymentState state;
  if (j.contains("previous")) state.previous = assignment_from_json(j.at("previous"));
  for (const auto& sid : j.value("protected", Json::array()))
    state.protected_services.insert(sid.get<std::string>());
  return state;
}

Json violations_to_json(const ViolationReport& report) {
  Json out = Json::array();
  for (const auto& v : report.items)
    out.push_back(Json{{"constraint", to_string(v.tag)},
                       {"entity", v.entity},
                       {"slack", clamp_finite(v.slack)}});
  return out;
}

Json catalog_violations_to_json(const std::vector<CatalogViolation>& violations) {
  Json out = Json::array();
  for (const auto& v : violations)
    out.push_back(Json{{"code", v.code}, {"entity", v.entity}, {"detail", v.detail}});
  return out;
}

Json trace_to_json(const RepairTrace& trace) {
  Json out = Json::array();
  for (const auto& a : trace.actions)
    out.push_back(Json{{"stage", a.stage},
                       {"action", a.action},
                       {"entity", a.entity},
                       {"before", clamp_finite(a.before)},
                       {"after", clamp_finite(a.after)}});
  return out;
}

Json plan_to_json(const OrchestrationPlan& plan) {
  Json trace = Json::array();
  for (const auto& row : plan.trace)
    trace.push_back(Json{{"iteration", row.iteration},
                         {"upper_bound", clamp_finite(row.upper_bound)},
                         {"relaxed_value", clamp_finite(row.relaxed_value)},
                         {"best_feasible", clamp_finite(row.best_feasible)},
                         {"mu", row.mu},
                         {"subgradient_norm", clamp_finite(row.subgradient_norm)}});
  return Json{{"objective", plan.objective},
              {"upper_bound", clamp_finite(plan.upper_bound)},
              {"iterations", plan.iterations},
              {"stop_reason", to_string(plan.stop_reason)},
              {"assignment", assignment_to_json(plan.assignment)},
              {"trace", std::move(trace)}};
}

}  // namespace oreo
