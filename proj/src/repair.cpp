#include "oreo/repair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oreo/allocation.hpp"

namespace oreo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void note(RepairTrace* trace, std::string stage, std::string action, std::string entity,
          double before, double after) {
  if (trace) trace->actions.push_back({std::move(stage), std::move(action), std::move(entity), before, after});
}

double norm_cost(const Assignment& a, const Catalog& catalog) {
  double total = 0.0;
  for (const auto& [inst, rho] : a.rho)
    for (int k = 0; k < kResourceCount; ++k) total += rho[k] / catalog.budget[k];
  return total / kResourceCount;
}

// Sorted selected keys restricted to services/configs present in the catalog.
std::vector<ConfigKey> selected_keys(const Assignment& a, const Catalog& catalog) {
  std::vector<ConfigKey> keys;
  for (const auto& key : a.selected) {
    auto it = catalog.services.find(key.service);
    if (it == catalog.services.end()) continue;
    if (!it->second.find_config(key.config)) continue;
    keys.push_back(key);
  }
  return keys;
}

// Members of an instance: (key, function is implied by the instance).
std::vector<ConfigKey> instance_members(const InstanceId& inst, const Assignment& a) {
  std::vector<ConfigKey> members;
  for (const auto& [key, used] : a.uses)
    if (used == inst && a.selected.count(key)) members.push_back(key);
  return members;
}

// Tightest equal-split per-node target among the configurations sharing the
// instance; +inf when nothing shares it.
double instance_demand(const InstanceId& inst, const Assignment& a, const Catalog& catalog) {
  double demand = kInf;
  for (const auto& key : instance_members(inst, a)) {
    const auto& svc = catalog.services.at(key.service);
    demand = std::min(demand, node_latency_target(svc, *svc.find_config(key.config)));
  }
  return demand;
}

double current_latency(const InstanceId& inst, const Assignment& a, const Catalog& catalog) {
  const XAppSpec* spec = catalog.xapp(inst.function_id, inst.chi);
  double cpu = 0.0;
  if (auto it = a.rho.find(inst); it != a.rho.end()) cpu = it->second.cpu;
  return xapp_latency_or_cap(cpu, spec->theta, aggregate_load(inst, a, catalog), kInf);
}

// Shrinks (never raises) an instance's CPU so its latency does not increase
// after losing load; removes it entirely once unused.
void shrink_after_member_loss(Assignment& a, const InstanceId& inst, double latency_before,
                              const Catalog& catalog) {
  auto members = instance_members(inst, a);
  if (members.empty()) {
    a.rho.erase(inst);
    return;
  }
  const XAppSpec* spec = catalog.xapp(inst.function_id, inst.chi);
  double load = aggregate_load(inst, a, catalog);
  auto it = a.rho.find(inst);
  if (it == a.rho.end()) return;
  if (std::isfinite(latency_before) && latency_before > 0.0)
    it->second.cpu = std::min(it->second.cpu, required_cpu(spec->theta, load, latency_before));
}

// Chosen xApp per function of one configuration (nullptr when coverage is
// broken), plus the instance carrying each node.
struct CoverView {
  std::map<std::string, const XAppSpec*> chosen;
  std::map<std::string, InstanceId> node_instance;
  bool complete = false;
};

CoverView cover_view(const ConfigKey& key, const ConfigGraph& cfg, const Assignment& a,
                     const Catalog& catalog) {
  CoverView view;
  for (const auto& [k, inst] : a.uses) {
    if (k != key) continue;
    view.chosen[inst.function_id] = catalog.xapp(inst.function_id, inst.chi);
    view.node_instance[inst.function_id] = inst;
  }
  view.complete = true;
  for (const auto& n : cfg.nodes)
    if (!view.chosen.count(n) || view.chosen.at(n) == nullptr) view.complete = false;
  return view;
}

double config_latency(const ConfigKey& key, const ConfigGraph& cfg, const Assignment& a,
                      const Catalog& catalog) {
  auto view = cover_view(key, cfg, a, catalog);
  std::map<std::string, double> lat;
  for (const auto& [node, inst] : view.node_instance) lat[node] = current_latency(inst, a, catalog);
  return service_latency(cfg, lat);
}

double config_sink_quality(const ConfigKey& key, const ConfigGraph& cfg, const Assignment& a,
                           const Catalog& catalog) {
  auto view = cover_view(key, cfg, a, catalog);
  if (!view.complete) return 0.0;
  return config_quality(cfg, view.chosen).sink_quality;
}

int next_replica(const Assignment& a, const std::string& function_id, int chi) {
  int next = 0;
  for (const auto& [inst, rho] : a.rho)
    if (inst.function_id == function_id && inst.chi == chi) next = std::max(next, inst.replica + 1);
  for (const auto& [key, inst] : a.uses)
    if (inst.function_id == function_id && inst.chi == chi) next = std::max(next, inst.replica + 1);
  return next;
}

// Attaches (key, f at chi) to the cheapest option: joining an existing
// instance of the same level or opening a fresh replica. Returns the
// instance used.
InstanceId attach_function(Assignment& a, const ConfigKey& key, const std::string& function_id,
                           int chi, const Catalog& catalog, RepairTrace* trace,
                           const char* stage) {
  const ServiceSpec& svc = catalog.services.at(key.service);
  const ConfigGraph& cfg = *svc.find_config(key.config);
  const XAppSpec& spec = *catalog.xapp(function_id, chi);
  double target = node_latency_target(svc, cfg);

  double best_share_cost = kInf;
  InstanceId best_share;
  for (const auto& [inst, rho] : a.rho) {
    if (inst.function_id != function_id || inst.chi != chi) continue;
    double latency = current_latency(inst, a, catalog);
    double goal = std::min(latency, target);
    double load = aggregate_load(inst, a, catalog);
    double delta_cpu = std::max(0.0, required_cpu(spec.theta, load + svc.input_rate, goal) - rho.cpu);
    double cost = delta_cpu / catalog.budget.cpu / kResourceCount;
    if (cost < best_share_cost) {
      best_share_cost = cost;
      best_share = inst;
    }
  }

  double fresh_cpu = required_cpu(spec.theta, svc.input_rate, target);
  double fresh_cost = (fresh_cpu / catalog.budget.cpu + spec.mem_req / catalog.budget.mem +
                       spec.disk_req / catalog.budget.disk) /
                      kResourceCount;

  if (best_share_cost < fresh_cost) {
    double latency = current_latency(best_share, a, catalog);
    double goal = std::min(latency, target);
    a.uses.insert({key, best_share});
    double load = aggregate_load(best_share, a, catalog);
    auto& rho = a.rho.at(best_share);
    rho.cpu = std::max(rho.cpu, required_cpu(spec.theta, load, goal));
    note(trace, stage, "share", key.str() + "/" + best_share.str(), best_share_cost, fresh_cost);
    return best_share;
  }

  InstanceId inst{function_id, chi, next_replica(a, function_id, chi)};
  a.uses.insert({key, inst});
  a.rho[inst] = {fresh_cpu, spec.mem_req, spec.disk_req};
  note(trace, stage, "new-instance", key.str() + "/" + inst.str(), fresh_cost, best_share_cost);
  return inst;
}

// Moves (key, f) from its current instance to complexity level `chi`,
// preserving every other sharer's latency.
void migrate_function(Assignment& a, const ConfigKey& key, const std::string& function_id,
                      int chi, const Catalog& catalog, RepairTrace* trace, const char* stage) {
  InstanceId old_inst;
  bool had = false;
  for (const auto& [k, inst] : a.uses) {
    if (k == key && inst.function_id == function_id) {
      old_inst = inst;
      had = true;
      break;
    }
  }
  if (had) {
    double latency_before = current_latency(old_inst, a, catalog);
    a.uses.erase({key, old_inst});
    shrink_after_member_loss(a, old_inst, latency_before, catalog);
  }
  attach_function(a, key, function_id, chi, catalog, trace, stage);
}

void drop_service(Assignment& a, const std::string& service_id, const Catalog& catalog) {
  std::vector<std::pair<ConfigKey, InstanceId>> removed;
  for (const auto& [key, inst] : a.uses)
    if (key.service == service_id) removed.push_back({key, inst});
  std::map<InstanceId, double> latency_before;
  for (const auto& [key, inst] : removed)
    if (!latency_before.count(inst)) latency_before[inst] = current_latency(inst, a, catalog);
  for (const auto& entry : removed) a.uses.erase(entry);
  std::erase_if(a.selected, [&](const ConfigKey& key) { return key.service == service_id; });
  for (const auto& [inst, lat] : latency_before) shrink_after_member_loss(a, inst, lat, catalog);
}

}  // namespace

double node_latency_target(const ServiceSpec& service, const ConfigGraph& config) {
  return service.target_latency * (1.0 - kLatencyMargin) / critical_path_length(config);
}

Assignment xapp_selection(const RelaxedSolution& relaxed, const DeploymentState& state,
                          const Catalog& catalog, RepairTrace* trace) {
  (void)state;  // sharing candidates live in the assignment; ids are reconciled in stage 4
  Assignment a;
  for (const auto& key : relaxed.point.selected)
    if (catalog.services.count(key.service) &&
        catalog.services.at(key.service).find_config(key.config))
      a.selected.insert(key);

  // Adopt the relaxed coverage: selected configurations only, first instance
  // per function, known levels only.
  std::set<std::pair<ConfigKey, std::string>> covered;
  for (const auto& [key, inst] : relaxed.point.uses) {
    if (!a.selected.count(key)) continue;
    const auto& svc = catalog.services.at(key.service);
    const ConfigGraph* cfg = svc.find_config(key.config);
    if (!cfg->has_node(inst.function_id)) continue;
    if (!catalog.xapp(inst.function_id, inst.chi)) continue;
    if (!covered.insert({key, inst.function_id}).second) continue;
    a.uses.insert({key, inst});
  }
  std::set<InstanceId> adopted;
  for (const auto& [key, inst] : a.uses) adopted.insert(inst);
  for (const auto& inst : adopted) {
    const XAppSpec& spec = *catalog.xapp(inst.function_id, inst.chi);
    ResourceVector rho;
    if (auto it = relaxed.point.rho.find(inst); it != relaxed.point.rho.end()) rho = it->second;
    rho.mem = std::max(rho.mem, spec.mem_req);
    rho.disk = std::max(rho.disk, spec.disk_req);
    a.rho[inst] = rho;
  }

  // Complete the coverage of every selected configuration.
  for (const auto& key : selected_keys(a, catalog)) {
    const auto& svc = catalog.services.at(key.service);
    const ConfigGraph& cfg = *svc.find_config(key.config);
    for (const auto& f : cfg.nodes) {
      if (covered.count({key, f})) continue;
      const auto& fn = catalog.functions.at(f);
      int chi = fn.max_complexity().chi;
      for (const auto& x : fn.xapps) {
        if (x.q_base >= svc.target_quality) {
          chi = x.chi;
          break;
        }
      }
      attach_function(a, key, f, chi, catalog, trace, "selection");
    }
  }
  return a;
}

Assignment service_quality_adjustment(const Assignment& assignment, const Catalog& catalog,
                                      RepairTrace* trace) {
  Assignment a = assignment;

  for (const auto& key : selected_keys(a, catalog)) {
    const auto& svc = catalog.services.at(key.service);
    const ConfigGraph& cfg = *svc.find_config(key.config);

    std::map<std::string, const XAppSpec*> best_chosen;
    for (const auto& n : cfg.nodes) best_chosen[n] = &catalog.functions.at(n).max_complexity();
    if (config_quality(cfg, best_chosen).sink_quality + 1e-12 < svc.target_quality) {
      double q = config_sink_quality(key, cfg, a, catalog);
      drop_service(a, key.service, catalog);
      note(trace, "quality", "drop-service", key.service, q, svc.target_quality);
      continue;
    }

    while (true) {
      double q = config_sink_quality(key, cfg, a, catalog);
      if (q + kFeasTol >= svc.target_quality) break;

      auto view = cover_view(key, cfg, a, catalog);
      struct Move {
        std::string function;
        int chi = 0;
        double gain = 0.0;
        double cost = 0.0;
        Assignment after;
      };
      std::optional<Move> best;
      auto better = [](const Move& x, const Move& y) {
        double ex = x.gain / std::max(x.cost, 1e-12);
        double ey = y.gain / std::max(y.cost, 1e-12);
        if (ex != ey) return ex > ey;
        if (x.gain != y.gain) return x.gain > y.gain;
        if (x.cost != y.cost) return x.cost < y.cost;
        return x.function < y.function;
      };
      for (const auto& n : cfg.nodes) {
        const auto& fn = catalog.functions.at(n);
        int cur_chi = view.node_instance.at(n).chi;
        const XAppSpec* next_spec = nullptr;
        for (const auto& x : fn.xapps)
          if (x.chi > cur_chi && (!next_spec || x.chi < next_spec->chi)) next_spec = &x;
        if (!next_spec) continue;

        Move move;
        move.function = n;
        move.chi = next_spec->chi;
        move.after = a;
        double cost_before = norm_cost(a, catalog);
        migrate_function(move.after, key, n, next_spec->chi, catalog, nullptr, "quality");
        move.gain = config_sink_quality(key, cfg, move.after, catalog) - q;
        move.cost = norm_cost(move.after, catalog) - cost_before;
        if (!best || better(move, *best)) best = std::move(move);
      }
      if (!best) break;  // unreachable: max-complexity feasibility was pre-checked

      // Prefer strictly improving moves; fall back to the cheapest neutral
      // raise when the bottleneck spans parallel branches.
      if (best->gain <= 0.0) {
        std::optional<Move> cheapest;
        for (const auto& n : cfg.nodes) {
          const auto& fn = catalog.functions.at(n);
          int cur_chi = view.node_instance.at(n).chi;
          const XAppSpec* next_spec = nullptr;
          for (const auto& x : fn.xapps)
            if (x.chi > cur_chi && (!next_spec || x.chi < next_spec->chi)) next_spec = &x;
          if (!next_spec) continue;
          Move move;
          move.function = n;
          move.chi = next_spec->chi;
          move.after = a;
          double cost_before = norm_cost(a, catalog);
          migrate_function(move.after, key, n, next_spec->chi, catalog, nullptr, "quality");
          move.gain = config_sink_quality(key, cfg, move.after, catalog) - q;
          move.cost = norm_cost(move.after, catalog) - cost_before;
          if (!cheapest || move.cost < cheapest->cost ||
              (move.cost == cheapest->cost && move.function < cheapest->function))
            cheapest = std::move(move);
        }
        best = std::move(cheapest);
      }
      note(trace, "quality", "raise-complexity", key.str() + "/" + best->function, q, q + best->gain);
      a = std::move(best->after);
    }
  }

  // Down-tuning: one sweep over deployed instances in ascending id order;
  // a reduction is kept only when every sharing service still meets its
  // quality target and the total cost strictly decreases.
  std::vector<InstanceId> instances;
  for (const auto& [inst, rho] : a.rho) instances.push_back(inst);
  std::sort(instances.begin(), instances.end());
  for (const auto& inst : instances) {
    if (!a.rho.count(inst)) continue;  // removed by an earlier reduction
    const auto& fn = catalog.functions.at(inst.function_id);
    const XAppSpec* lower = nullptr;
    for (const auto& x : fn.xapps)
      if (x.chi < inst.chi && (!lower || x.chi > lower->chi)) lower = &x;
    if (!lower) continue;

    auto members = instance_members(inst, a);
    if (members.empty()) continue;

    Assignment candidate = a;
    for (const auto& key : members)
      migrate_function(candidate, key, inst.function_id, lower->chi, catalog, nullptr, "quality");

    bool quality_ok = true;
    for (const auto& key : selected_keys(candidate, catalog)) {
      const auto& svc = catalog.services.at(key.service);
      const ConfigGraph& cfg = *svc.find_config(key.config);
      if (config_sink_quality(key, cfg, candidate, catalog) + kFeasTol < svc.target_quality) {
        quality_ok = false;
        break;
      }
    }
    if (!quality_ok) continue;
    double before = norm_cost(a, catalog), after = norm_cost(candidate, catalog);
    if (after + 1e-12 >= before) continue;
    note(trace, "quality", "lower-complexity", inst.str(), before, after);
    a = std::move(candidate);
  }

  return a;
}

Assignment service_latency_adjustment(const Assignment& assignment, const Catalog& catalog,
                                      RepairTrace* trace) {
  Assignment a = assignment;
  int guard = 0;
  const int guard_limit = 100000;

  while (true) {
    if (++guard > guard_limit) throw std::logic_error("latency adjustment failed to converge");

    const ConfigKey* violating = nullptr;
    const ConfigGraph* cfg = nullptr;
    auto keys = selected_keys(a, catalog);
    for (const auto& key : keys) {
      const auto& s = catalog.services.at(key.service);
      const ConfigGraph& c = *s.find_config(key.config);
      if (config_latency(key, c, a, catalog) > s.target_latency * (1.0 - kLatencyMargin / 2.0)) {
        violating = &key;
        cfg = &c;
        break;
      }
    }
    if (!violating) break;

    auto view = cover_view(*violating, *cfg, a, catalog);
    std::map<std::string, double> lat;
    for (const auto& [node, inst] : view.node_instance) lat[node] = current_latency(inst, a, catalog);

    std::vector<std::string> critical;
    double worst = -1.0;
    for (const auto& path : enumerate_paths(*cfg)) {
      double total = 0.0;
      for (const auto& n : path) total += lat.at(n);
      if (total > worst) {
        worst = total;
        critical = path;
      }
    }

    double before = worst;
    std::string best_node;
    double best_delta = kInf;
    double best_cpu = 0.0;
    for (const auto& n : critical) {
      const InstanceId& inst = view.node_instance.at(n);
      const XAppSpec& spec = *catalog.xapp(inst.function_id, inst.chi);
      double needed = required_cpu(spec.theta, aggregate_load(inst, a, catalog),
                                   instance_demand(inst, a, catalog));
      double delta = needed - a.rho.at(inst).cpu;
      if (delta > 1e-15 && delta < best_delta) {
        best_delta = delta;
        best_node = n;
        best_cpu = needed;
      }
    }
    if (best_node.empty()) {
      // numeric corner: force the whole configuration onto per-node targets
      for (const auto& n : critical) {
        const InstanceId& inst = view.node_instance.at(n);
        const XAppSpec& spec = *catalog.xapp(inst.function_id, inst.chi);
        a.rho.at(inst).cpu = required_cpu(spec.theta, aggregate_load(inst, a, catalog),
                                          instance_demand(inst, a, catalog));
      }
      continue;
    }
    a.rho.at(view.node_instance.at(best_node)).cpu = best_cpu;
    note(trace, "latency", "raise-cpu", violating->str() + "/" + best_node, before,
         config_latency(*violating, *cfg, a, catalog));
  }
  return a;
}

// Re-solves the continuous CPU sizing jointly for the current skeleton;
// keeps the current allocation when the transition cap is unattainable
// (stage 4 then drops services).
Assignment right_size_cpu(const Assignment& assignment, const DeploymentState& state,
                          const Catalog& catalog) {
  Assignment a = assignment;
  auto sized = min_cpu_allocation(a, state, catalog);
  if (!sized.feasible) return a;
  for (const auto& [inst, cpu] : sized.cpu) {
    auto it = a.rho.find(inst);
    if (it != a.rho.end()) it->second.cpu = cpu;
  }
  return a;
}

Assignment budget_enforcement(const Assignment& assignment, const DeploymentState& state,
                              const Catalog& catalog, RepairTrace* trace,
                              std::vector<std::string>* dropped) {
  Assignment a = canonicalize_replicas(assignment, state, catalog);
  a = right_size_cpu(a, state, catalog);

  while (true) {
    bool violated = false;
    for (int k = 0; k < kResourceCount && !violated; ++k) {
      double total = 0.0;
      for (const auto& [inst, rho] : a.rho) total += rho[k];
      if (total > catalog.budget[k] * (1.0 + kFeasTol)) violated = true;
    }
    if (!violated) {
      auto [f1, f2] = transition_sets(state, a);
      violated = !transition_budget_check(f1, f2, state, a, catalog).empty();
    }
    if (!violated) break;

    std::string victim;
    double victim_priority = kInf;
    double victim_cost = -1.0;
    for (const auto& key : selected_keys(a, catalog)) {
      const auto& svc = catalog.services.at(key.service);
      double cost = 0.0;
      for (const auto& [k, inst] : a.uses) {
        if (k != key) continue;
        if (instance_members(inst, a).size() != 1) continue;  // shared, not exclusive
        const auto& rho = a.rho.at(inst);
        for (int r = 0; r < kResourceCount; ++r) cost += rho[r] / catalog.budget[r];
      }
      bool take = false;
      if (svc.priority < victim_priority)
        take = true;
      else if (svc.priority == victim_priority && cost > victim_cost)
        take = true;
      else if (svc.priority == victim_priority && cost == victim_cost && key.service > victim)
        take = true;
      if (take) {
        victim = key.service;
        victim_priority = svc.priority;
        victim_cost = cost;
      }
    }
    if (victim.empty()) break;  // nothing left to deactivate

    double excess_before = 0.0;
    for (const auto& [inst, rho] : a.rho) excess_before += rho.cpu;
    drop_service(a, victim, catalog);
    a = canonicalize_replicas(a, state, catalog);
    a = right_size_cpu(a, state, catalog);
    double excess_after = 0.0;
    for (const auto& [inst, rho] : a.rho) excess_after += rho.cpu;
    note(trace, "budget", "drop-service", victim, excess_before, excess_after);
    if (dropped) dropped->push_back(victim);
  }
  return a;
}

std::pair<Assignment, RepairTrace> repair(const RelaxedSolution& relaxed,
                                          const DeploymentState& state, const Catalog& catalog) {
  RepairTrace trace;
  Assignment a = xapp_selection(relaxed, state, catalog, &trace);
  a = service_quality_adjustment(a, catalog, &trace);
  a = service_latency_adjustment(a, catalog, &trace);
  a = budget_enforcement(a, state, catalog, &trace, nullptr);
  return {a, trace};
}

}  // namespace oreo
