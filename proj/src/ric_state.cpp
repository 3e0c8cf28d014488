#include "oreo/ric_state.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace oreo {

namespace {
constexpr double kLatencyCap = 1e18;

double norm_mass(const ResourceVector& r, const Catalog& catalog) {
  double total = 0.0;
  for (int k = 0; k < kResourceCount; ++k) total += r[k] / catalog.budget[k];
  return total;
}
}  // namespace

const char* to_string(ConstraintTag tag) {
  switch (tag) {
    case ConstraintTag::kCfgUnique: return "CFG-UNIQUE";
    case ConstraintTag::kFuncCover: return "FUNC-COVER";
    case ConstraintTag::kFuncForeign: return "FUNC-FOREIGN";
    case ConstraintTag::kStorage: return "STORAGE";
    case ConstraintTag::kQuality: return "QUALITY";
    case ConstraintTag::kLatency: return "LATENCY";
    case ConstraintTag::kBudget: return "BUDGET";
    case ConstraintTag::kTransition: return "TRANSITION";
  }
  return "?";
}

double objective(const Assignment& assignment, const Catalog& catalog) {
  double value = 0.0;
  for (const auto& key : assignment.selected) {
    auto it = catalog.services.find(key.service);
    if (it != catalog.services.end()) value += it->second.priority;
  }
  double resource = 0.0;
  for (const auto& [inst, rho] : assignment.rho) resource += norm_mass(rho, catalog);
  return value - resource / kResourceCount;
}

double aggregate_load(const InstanceId& instance, const Assignment& assignment,
                      const Catalog& catalog) {
  double load = 0.0;
  for (const auto& [key, inst] : assignment.uses) {
    if (inst != instance) continue;
    if (!assignment.selected.count(key)) continue;
    auto it = catalog.services.find(key.service);
    if (it != catalog.services.end()) load += it->second.input_rate;
  }
  return load;
}

std::map<InstanceId, double> instance_latencies(const Assignment& assignment,
                                                const Catalog& catalog, double cap) {
  std::map<InstanceId, double> out;
  std::set<InstanceId> instances;
  for (const auto& [key, inst] : assignment.uses) instances.insert(inst);
  for (const auto& inst : instances) {
    const XAppSpec* spec = catalog.xapp(inst.function_id, inst.chi);
    if (!spec) {
      out[inst] = cap;
      continue;
    }
    double cpu = 0.0;
    if (auto it = assignment.rho.find(inst); it != assignment.rho.end()) cpu = it->second.cpu;
    out[inst] = xapp_latency_or_cap(cpu, spec->theta, aggregate_load(inst, assignment, catalog), cap);
  }
  return out;
}

std::optional<ConfigPerformance> evaluate_config(const ConfigKey& key,
                                                 const Assignment& assignment,
                                                 const Catalog& catalog, double latency_cap) {
  auto svc_it = catalog.services.find(key.service);
  if (svc_it == catalog.services.end()) return std::nullopt;
  const ConfigGraph* cfg = svc_it->second.find_config(key.config);
  if (!cfg) return std::nullopt;

  std::map<std::string, const XAppSpec*> chosen;
  std::map<std::string, InstanceId> node_instance;
  for (const auto& [k, inst] : assignment.uses) {
    if (k != key) continue;
    if (chosen.count(inst.function_id)) return std::nullopt;  // double coverage
    const XAppSpec* spec = catalog.xapp(inst.function_id, inst.chi);
    if (!spec) return std::nullopt;
    chosen[inst.function_id] = spec;
    node_instance[inst.function_id] = inst;
  }
  for (const auto& n : cfg->nodes)
    if (!chosen.count(n)) return std::nullopt;  // uncovered
  if (chosen.size() != cfg->nodes.size()) return std::nullopt;  // foreign coverage

  auto lat = instance_latencies(assignment, catalog, latency_cap);
  std::map<std::string, double> node_latency;
  for (const auto& [node, inst] : node_instance) node_latency[node] = lat.at(inst);

  ConfigPerformance perf;
  perf.quality = config_quality(*cfg, chosen).sink_quality;
  perf.latency = service_latency(*cfg, node_latency);
  return perf;
}

std::pair<std::set<InstanceId>, std::set<InstanceId>> transition_sets(
    const DeploymentState& state, const Assignment& new_assignment) {
  std::set<InstanceId> f1, f2;
  for (const auto& [key, inst] : state.previous.uses)
    if (state.protected_services.count(key.service) && state.previous.selected.count(key))
      f1.insert(inst);
  for (const auto& [key, inst] : new_assignment.uses)
    if (state.protected_services.count(key.service) && new_assignment.selected.count(key))
      f2.insert(inst);
  return {f1, f2};
}

std::vector<Violation> transition_budget_check(const std::set<InstanceId>& f1,
                                               const std::set<InstanceId>& f2,
                                               const DeploymentState& state,
                                               const Assignment& new_assignment,
                                               const Catalog& catalog) {
  std::vector<Violation> out;
  for (int k = 0; k < kResourceCount; ++k) {
    double total = 0.0;
    for (const auto& inst : f1) {
      if (f2.count(inst)) continue;
      auto it = state.previous.rho.find(inst);
      if (it != state.previous.rho.end()) total += it->second[k];
    }
    for (const auto& inst : f2) {
      auto it = new_assignment.rho.find(inst);
      if (it != new_assignment.rho.end()) total += it->second[k];
    }
    double slack = total - catalog.budget[k];
    if (slack > kFeasTol * catalog.budget[k])
      out.push_back({ConstraintTag::kTransition, resource_name(k), slack});
  }
  return out;
}

ViolationReport check_feasibility(const Assignment& assignment, const DeploymentState& state,
                                  const Catalog& catalog) {
  ViolationReport report;
  auto add = [&](ConstraintTag tag, std::string entity, double slack) {
    report.items.push_back({tag, std::move(entity), slack});
  };

  // (2) at most one configuration per service
  std::map<std::string, int> per_service;
  for (const auto& key : assignment.selected) per_service[key.service]++;
  for (const auto& [sid, count] : per_service)
    if (count > 1) add(ConstraintTag::kCfgUnique, sid, count - 1);

  // (3)/(11) coverage and (4) foreign attachments
  std::map<std::pair<ConfigKey, std::string>, int> coverage;
  for (const auto& [key, inst] : assignment.uses) {
    const ServiceSpec* svc = nullptr;
    const ConfigGraph* cfg = nullptr;
    if (auto it = catalog.services.find(key.service); it != catalog.services.end()) {
      svc = &it->second;
      cfg = svc->find_config(key.config);
    }
    if (!svc || !cfg) {
      add(ConstraintTag::kFuncForeign, key.str() + "/" + inst.str(), 1.0);
      continue;
    }
    if (!catalog.xapp(inst.function_id, inst.chi)) {
      add(ConstraintTag::kFuncForeign, key.str() + "/" + inst.str(), 1.0);
      continue;
    }
    if (!cfg->has_node(inst.function_id)) {
      add(ConstraintTag::kFuncForeign, key.str() + "/" + inst.str(), 1.0);
      continue;
    }
    if (!assignment.selected.count(key)) {
      add(ConstraintTag::kFuncForeign, key.str() + "/" + inst.str(), 1.0);
      continue;
    }
    coverage[{key, inst.function_id}]++;
  }
  for (const auto& key : assignment.selected) {
    auto it = catalog.services.find(key.service);
    if (it == catalog.services.end()) {
      add(ConstraintTag::kFuncForeign, key.str(), 1.0);
      continue;
    }
    const ConfigGraph* cfg = it->second.find_config(key.config);
    if (!cfg) {
      add(ConstraintTag::kFuncForeign, key.str(), 1.0);
      continue;
    }
    for (const auto& n : cfg->nodes) {
      int cnt = 0;
      if (auto cit = coverage.find({key, n}); cit != coverage.end()) cnt = cit->second;
      if (cnt != 1) add(ConstraintTag::kFuncCover, key.str() + "/" + n, std::abs(cnt - 1));
    }
  }

  // (5) storage footprints for deployed instances
  std::set<InstanceId> deployed;
  for (const auto& [key, inst] : assignment.uses) deployed.insert(inst);
  for (const auto& inst : deployed) {
    const XAppSpec* spec = catalog.xapp(inst.function_id, inst.chi);
    if (!spec) continue;  // already reported as foreign
    ResourceVector rho;
    if (auto it = assignment.rho.find(inst); it != assignment.rho.end()) rho = it->second;
    double mem_gap = spec->mem_req - rho.mem;
    double disk_gap = spec->disk_req - rho.disk;
    if (mem_gap > kFeasTol * std::max(1.0, spec->mem_req))
      add(ConstraintTag::kStorage, inst.str() + "/mem", mem_gap);
    if (disk_gap > kFeasTol * std::max(1.0, spec->disk_req))
      add(ConstraintTag::kStorage, inst.str() + "/disk", disk_gap);
  }

  // (6) quality and (7) latency, original nonlinear form, selected configs only
  for (const auto& key : assignment.selected) {
    auto svc_it = catalog.services.find(key.service);
    if (svc_it == catalog.services.end()) continue;
    auto perf = evaluate_config(key, assignment, catalog, kLatencyCap);
    if (!perf) continue;  // coverage violations already describe this config
    double q_gap = svc_it->second.target_quality - perf->quality;
    if (q_gap > kFeasTol) add(ConstraintTag::kQuality, key.str(), q_gap);
    double t_gap = perf->latency - svc_it->second.target_latency;
    if (t_gap > kFeasTol * std::max(1.0, svc_it->second.target_latency))
      add(ConstraintTag::kLatency, key.str(), t_gap);
  }

  // (8) resource budget
  for (int k = 0; k < kResourceCount; ++k) {
    double total = 0.0;
    for (const auto& [inst, rho] : assignment.rho) total += rho[k];
    double slack = total - catalog.budget[k];
    if (slack > kFeasTol * catalog.budget[k])
      add(ConstraintTag::kBudget, resource_name(k), slack);
  }

  // (9) transition co-existence
  auto [f1, f2] = transition_sets(state, assignment);
  for (auto& v : transition_budget_check(f1, f2, state, assignment, catalog))
    report.items.push_back(std::move(v));

  return report;
}

Assignment canonicalize_replicas(const Assignment& assignment, const DeploymentState& state,
                                 const Catalog& catalog) {
  // Instances present in the assignment, grouped by (function, chi).
  std::map<std::pair<std::string, int>, std::vector<InstanceId>> groups;
  std::set<InstanceId> all;
  for (const auto& [key, inst] : assignment.uses) all.insert(inst);
  for (const auto& [inst, rho] : assignment.rho) all.insert(inst);
  for (const auto& inst : all) groups[{inst.function_id, inst.chi}].push_back(inst);

  // Which instances serve a protected (continuing) service.
  std::set<InstanceId> serves_protected;
  for (const auto& [key, inst] : assignment.uses)
    if (state.protected_services.count(key.service) && assignment.selected.count(key))
      serves_protected.insert(inst);

  // Previous-epoch instances eligible for adoption, per (function, chi),
  // heaviest allocation first.
  auto [f1, f2_unused] = transition_sets(state, assignment);
  std::map<std::pair<std::string, int>, std::vector<InstanceId>> adoptable;
  {
    std::vector<std::pair<double, InstanceId>> ranked;
    for (const auto& inst : f1) {
      double mass = 0.0;
      if (auto it = state.previous.rho.find(inst); it != state.previous.rho.end())
        mass = norm_mass(it->second, catalog);
      ranked.push_back({mass, inst});
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (const auto& [mass, inst] : ranked) adoptable[{inst.function_id, inst.chi}].push_back(inst);
  }

  std::map<InstanceId, InstanceId> rename;
  for (auto& [fc, members] : groups) {
    std::sort(members.begin(), members.end());
    std::set<int> taken;
    const auto& candidates = adoptable[fc];
    std::size_t next_candidate = 0;
    std::vector<InstanceId> fresh_queue;
    for (const auto& inst : members) {
      if (serves_protected.count(inst) && next_candidate < candidates.size()) {
        InstanceId target = candidates[next_candidate++];
        rename[inst] = target;
        taken.insert(target.replica);
      } else {
        fresh_queue.push_back(inst);
      }
    }
    int next_free = 0;
    for (const auto& inst : fresh_queue) {
      while (taken.count(next_free)) ++next_free;
      rename[inst] = {fc.first, fc.second, next_free};
      taken.insert(next_free);
    }
  }

  Assignment out;
  out.selected = assignment.selected;
  for (const auto& [key, inst] : assignment.uses) out.uses.insert({key, rename.at(inst)});
  for (const auto& [inst, rho] : assignment.rho) out.rho[rename.at(inst)] = rho;
  return out;
}

}  // namespace oreo
