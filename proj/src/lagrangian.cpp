#include "oreo/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oreo {

namespace {

// Per-instance cost of serving load lambda with latency pressure delta_eff at
// the closed-form CPU optimum: rho*/(K B_cpu) + delta_eff * l(rho*).
double instance_cost_at_optimum(double delta_eff, double lambda, double theta,
                                double k_times_bcpu) {
  return lambda / (theta * k_times_bcpu) + 2.0 * std::sqrt(delta_eff / (theta * k_times_bcpu));
}

// Input rate per instance over every attached configuration; the relaxed
// point carries coverage independently of the configuration selection.
std::map<InstanceId, double> relaxed_loads(const Assignment& point, const Catalog& catalog) {
  std::map<InstanceId, double> loads;
  for (const auto& [key, inst] : point.uses) {
    auto it = catalog.services.find(key.service);
    if (it != catalog.services.end()) loads[inst] += it->second.input_rate;
  }
  return loads;
}

struct RelaxedPerf {
  double quality = 0.0;
  double latency = 0.0;
};

// Quality/latency of one configuration under partial coverage: uncovered
// functions forward their input unchanged and add no latency; a configuration
// with nothing deployed has quality 0 and latency 0. Node latency saturates
// at `node_cap`.
RelaxedPerf relaxed_config_perf(const ConfigKey& key, const ConfigGraph& cfg,
                                const Assignment& point, const Catalog& catalog,
                                const std::map<InstanceId, double>& loads, double node_cap) {
  std::map<std::string, const XAppSpec*> covered;
  std::map<std::string, double> node_latency;
  for (const auto& [k, inst] : point.uses) {
    if (k != key) continue;
    if (covered.count(inst.function_id)) continue;  // one instance per function
    const XAppSpec* spec = catalog.xapp(inst.function_id, inst.chi);
    if (!spec) continue;
    covered[inst.function_id] = spec;
    double cpu = 0.0;
    if (auto it = point.rho.find(inst); it != point.rho.end()) cpu = it->second.cpu;
    double load = 0.0;
    if (auto it = loads.find(inst); it != loads.end()) load = it->second;
    node_latency[inst.function_id] = xapp_latency_or_cap(cpu, spec->theta, load, node_cap);
  }

  RelaxedPerf perf;
  if (covered.empty()) return perf;

  std::map<std::string, std::vector<std::string>> preds;
  std::map<std::string, bool> has_succ;
  for (const auto& n : cfg.nodes) {
    preds[n];
    has_succ[n] = false;
  }
  for (const auto& [from, to] : cfg.edges) {
    preds[to].push_back(from);
    has_succ[from] = true;
  }
  std::map<std::string, double> q;
  for (const auto& n : topological_order(cfg)) {
    double input = 1.0;
    for (const auto& p : preds[n]) input = std::min(input, q.at(p));
    auto it = covered.find(n);
    q[n] = it == covered.end() ? input : it->second->q_base * input;
  }
  perf.quality = 1.0;
  for (const auto& n : cfg.nodes)
    if (!has_succ[n]) perf.quality = std::min(perf.quality, q.at(n));

  for (const auto& path : enumerate_paths(cfg)) {
    double total = 0.0;
    for (const auto& n : path) {
      auto it = node_latency.find(n);
      if (it != node_latency.end()) total += it->second;
    }
    perf.latency = std::max(perf.latency, total);
  }
  return perf;
}

}  // namespace

double big_m(const Catalog& catalog) {
  double max_t = 0.0;
  for (const auto& [sid, svc] : catalog.services) max_t = std::max(max_t, svc.target_latency);
  return 100.0 * max_t;
}

double lr2_cpu_star(double delta_eff, double theta, double lambda_total, double k_times_bcpu) {
  return (lambda_total + std::sqrt(delta_eff * theta * k_times_bcpu)) / theta;
}

LagrangianValue lagrangian_value(const Assignment& point, const Multipliers& multipliers,
                                 const Catalog& catalog) {
  LagrangianValue out;
  const double m_big = big_m(catalog);

  for (const auto& [sid, svc] : catalog.services) {
    for (const auto& cfg : svc.configs) {
      ConfigKey key{sid, cfg.id};
      double delta = multipliers.delta_at(key);
      out.part1 += delta * (m_big + svc.target_latency);
      if (!point.selected.count(key)) continue;
      double score = svc.priority - multipliers.gamma_at(key) * svc.target_quality -
                     m_big * delta;
      for (const auto& f : cfg.nodes) score -= multipliers.beta_at(key, f);
      out.part1 += score;
    }
  }

  auto loads = relaxed_loads(point, catalog);
  for (const auto& [sid, svc] : catalog.services) {
    for (const auto& cfg : svc.configs) {
      ConfigKey key{sid, cfg.id};
      double gamma = multipliers.gamma_at(key);
      double delta = multipliers.delta_at(key);
      if (gamma != 0.0 || delta != 0.0) {
        auto perf = relaxed_config_perf(key, cfg, point, catalog, loads, m_big);
        out.part2 += gamma * perf.quality - delta * perf.latency;
      }
    }
  }
  for (const auto& [key, inst] : point.uses)
    out.part2 += multipliers.beta_at(key, inst.function_id);
  double resource = 0.0;
  for (const auto& [inst, rho] : point.rho)
    for (int k = 0; k < kResourceCount; ++k) resource += rho[k] / catalog.budget[k];
  out.part2 -= resource / kResourceCount;

  out.total = out.part1 + out.part2;
  return out;
}

Lr1Result solve_lr1(const Multipliers& multipliers, const Catalog& catalog) {
  Lr1Result result;
  const double m_big = big_m(catalog);
  for (const auto& [sid, svc] : catalog.services) {
    const ConfigGraph* best_cfg = nullptr;
    double best_score = 0.0;
    for (const auto& cfg : svc.configs) {
      ConfigKey key{sid, cfg.id};
      double score = svc.priority - multipliers.gamma_at(key) * svc.target_quality -
                     m_big * multipliers.delta_at(key);
      for (const auto& f : cfg.nodes) score -= multipliers.beta_at(key, f);
      result.value += multipliers.delta_at(key) * (m_big + svc.target_latency);
      if (!best_cfg || score > best_score) {  // ties keep the lowest config id
        best_cfg = &cfg;
        best_score = score;
      }
    }
    if (best_cfg && best_score > 0.0) {
      result.selected.insert({sid, best_cfg->id});
      result.value += best_score;
    }
  }
  return result;
}

Lr2Result solve_lr2(const Multipliers& multipliers, const DeploymentState& state,
                    const Catalog& catalog) {
  Lr2Result result;
  const double k3 = kResourceCount * catalog.budget.cpu;

  struct WorkInstance {
    InstanceId id;
    const XAppSpec* spec = nullptr;
    double lambda = 0.0;
    double delta_eff = 0.0;
    int member_count = 0;
  };
  struct Committed {
    int work = -1;
    double value = 0.0;
    double lambda = 0.0;
    double delta = 0.0;
  };
  std::vector<WorkInstance> works;
  std::map<std::pair<std::string, int>, std::vector<int>> by_level;  // (function, chi) -> works
  std::map<std::pair<ConfigKey, std::string>, Committed> committed;

  // Upper bound on the LR2 optimum: quality capped at 1 per configuration,
  // latency terms nonnegative, and each covered triple at least pays the
  // stability-floor CPU share of the cheapest complexity level.
  for (const auto& [sid, svc] : catalog.services) {
    for (const auto& cfg : svc.configs) {
      ConfigKey key{sid, cfg.id};
      result.bound += multipliers.gamma_at(key);
      for (const auto& f : cfg.nodes) {
        double theta_max = 0.0;
        auto fit = catalog.functions.find(f);
        if (fit == catalog.functions.end()) continue;
        for (const auto& x : fit->second.xapps) theta_max = std::max(theta_max, x.theta);
        double floor_cost = svc.input_rate / (theta_max * k3);
        result.bound += std::max(0.0, multipliers.beta_at(key, f) - floor_cost);
      }
    }
  }

  // Greedy per-triple selection.
  for (const auto& [sid, svc] : catalog.services) {
    std::vector<const ConfigGraph*> cfgs;
    for (const auto& cfg : svc.configs) cfgs.push_back(&cfg);
    std::sort(cfgs.begin(), cfgs.end(),
              [](const ConfigGraph* a, const ConfigGraph* b) { return a->id < b->id; });
    for (const ConfigGraph* cfg : cfgs) {
      ConfigKey key{sid, cfg->id};
      double gamma = multipliers.gamma_at(key);
      double delta = multipliers.delta_at(key);
      std::vector<std::string> nodes = cfg->nodes;
      std::sort(nodes.begin(), nodes.end());
      for (const auto& f : nodes) {
        auto fit = catalog.functions.find(f);
        if (fit == catalog.functions.end()) continue;
        double beta = multipliers.beta_at(key, f);

        double best_value = 0.0;
        int best_work = -1;
        const XAppSpec* best_spec = nullptr;
        bool found = false;
        for (const auto& spec : fit->second.xapps) {
          double quality_term = gamma * (spec.q_base - 1.0);
          // share an instance created earlier in this pass
          for (int w : by_level[{f, spec.chi}]) {
            const auto& work = works[w];
            double marginal =
                instance_cost_at_optimum(work.delta_eff + delta, work.lambda + svc.input_rate,
                                         spec.theta, k3) -
                instance_cost_at_optimum(work.delta_eff, work.lambda, spec.theta, k3);
            double value = beta + quality_term - marginal;
            if (!found || value > best_value) {
              best_value = value;
              best_work = w;
              best_spec = &spec;
              found = true;
            }
          }
          // fresh replica
          double storage = (spec.mem_req / catalog.budget.mem + spec.disk_req / catalog.budget.disk) /
                           kResourceCount;
          double value = beta + quality_term -
                         instance_cost_at_optimum(delta, svc.input_rate, spec.theta, k3) - storage;
          if (!found || value > best_value) {
            best_value = value;
            best_work = -1;
            best_spec = &spec;
            found = true;
          }
        }
        if (!found || best_value <= 0.0) continue;

        int w = best_work;
        if (w < 0) {
          auto& slot = by_level[{f, best_spec->chi}];
          w = int(works.size());
          works.push_back({{f, best_spec->chi, int(slot.size())}, best_spec, 0.0, 0.0, 0});
          slot.push_back(w);
        }
        works[w].lambda += svc.input_rate;
        works[w].delta_eff += delta;
        works[w].member_count++;
        committed[{key, f}] = {w, best_value, svc.input_rate, delta};
      }
    }
  }

  // Materialize, then fit the retained budget/transition constraints:
  // storage overruns drop the cheapest selections, CPU scales down
  // proportionally (with stability floors).
  auto drop_cheapest = [&]() {
    auto victim = committed.end();
    for (auto it = committed.begin(); it != committed.end(); ++it)
      if (victim == committed.end() || it->second.value < victim->second.value) victim = it;
    auto& work = works[victim->second.work];
    work.lambda -= victim->second.lambda;
    work.delta_eff -= victim->second.delta;
    work.member_count--;
    committed.erase(victim);
  };

  while (true) {
    Assignment point;
    std::map<InstanceId, double> cpu_star;
    for (const auto& [triple, c] : committed)
      point.uses.insert({triple.first, works[c.work].id});
    for (const auto& work : works) {
      if (work.member_count <= 0) continue;
      double star = lr2_cpu_star(work.delta_eff, work.spec->theta, work.lambda, k3);
      double floor = work.lambda * (1.0 + kStabilityMargin) / work.spec->theta;
      cpu_star[work.id] = std::max(star, floor);
      point.rho[work.id] = {cpu_star[work.id], work.spec->mem_req, work.spec->disk_req};
    }
    if (committed.empty()) {
      result.uses = point.uses;
      result.rho = point.rho;
      break;
    }

    Assignment canon = canonicalize_replicas(point, state, catalog);
    auto [f1, f2] = transition_sets(state, canon);

    // storage feasibility, plain and transition
    bool storage_bad = false;
    for (int k = 1; k < kResourceCount && !storage_bad; ++k) {
      double total = 0.0;
      for (const auto& [inst, rho] : canon.rho) total += rho[k];
      if (total > catalog.budget[k] * (1.0 + kFeasTol)) storage_bad = true;
      double carried = 0.0;
      for (const auto& inst : f1)
        if (!f2.count(inst))
          if (auto it = state.previous.rho.find(inst); it != state.previous.rho.end())
            carried += it->second[k];
      double f2_total = 0.0;
      for (const auto& inst : f2)
        if (auto it = canon.rho.find(inst); it != canon.rho.end()) f2_total += it->second[k];
      if (carried + f2_total > catalog.budget[k] * (1.0 + kFeasTol)) storage_bad = true;
    }
    if (storage_bad) {
      drop_cheapest();
      continue;
    }

    // CPU scale-down
    double total_cpu = 0.0, f2_cpu = 0.0, carried_cpu = 0.0;
    for (const auto& [inst, rho] : canon.rho) total_cpu += rho.cpu;
    for (const auto& inst : f2)
      if (auto it = canon.rho.find(inst); it != canon.rho.end()) f2_cpu += it->second.cpu;
    for (const auto& inst : f1)
      if (!f2.count(inst))
        if (auto it = state.previous.rho.find(inst); it != state.previous.rho.end())
          carried_cpu += it->second.cpu;
    double scale = 1.0;
    if (total_cpu > catalog.budget.cpu) scale = std::min(scale, catalog.budget.cpu / total_cpu);
    if (f2_cpu > 0.0) {
      double room = catalog.budget.cpu - carried_cpu;
      if (room <= 0.0)
        scale = 0.0;
      else if (f2_cpu > room)
        scale = std::min(scale, room / f2_cpu);
    }

    // floors may undo part of the scaling; verify and drop if irreducible
    double scaled_total = 0.0, scaled_f2 = 0.0;
    for (auto& [inst, rho] : canon.rho) {
      const XAppSpec* spec = catalog.xapp(inst.function_id, inst.chi);
      double load = 0.0;
      for (const auto& [key, used] : canon.uses) {
        if (used != inst) continue;
        auto sit = catalog.services.find(key.service);
        if (sit != catalog.services.end()) load += sit->second.input_rate;
      }
      double floor = load * (1.0 + kStabilityMargin) / spec->theta;
      rho.cpu = std::max(floor, scale * rho.cpu);
      scaled_total += rho.cpu;
      if (f2.count(inst)) scaled_f2 += rho.cpu;
    }
    if (scaled_total > catalog.budget.cpu * (1.0 + kFeasTol) ||
        carried_cpu + scaled_f2 > catalog.budget.cpu * (1.0 + kFeasTol)) {
      drop_cheapest();
      continue;
    }

    result.uses = canon.uses;
    result.rho = canon.rho;
    break;
  }
  return result;
}

double Subgradients::squared_norm() const {
  double total = 0.0;
  for (const auto& [key, g] : beta) total += g * g;
  for (const auto& [key, g] : gamma) total += g * g;
  for (const auto& [key, g] : delta) total += g * g;
  return total;
}

Subgradients subgradients(const RelaxedSolution& relaxed, const Catalog& catalog) {
  Subgradients out;
  const double m_big = big_m(catalog);
  auto loads = relaxed_loads(relaxed.point, catalog);

  std::map<std::pair<ConfigKey, std::string>, int> cover;
  for (const auto& [key, inst] : relaxed.point.uses) cover[{key, inst.function_id}]++;

  for (const auto& [sid, svc] : catalog.services) {
    for (const auto& cfg : svc.configs) {
      ConfigKey key{sid, cfg.id};
      double z = relaxed.point.selected.count(key) ? 1.0 : 0.0;
      for (const auto& f : cfg.nodes) {
        int covered = 0;
        if (auto it = cover.find({key, f}); it != cover.end()) covered = it->second;
        out.beta[{key, f}] = z - covered;
      }
      auto perf = relaxed_config_perf(key, cfg, relaxed.point, catalog, loads, m_big);
      out.gamma[key] = svc.target_quality * z - perf.quality;
      out.delta[key] = perf.latency - svc.target_latency - m_big * (1.0 - z);
    }
  }
  return out;
}

bool update_multipliers(Multipliers& multipliers, const Subgradients& gradients,
                        StepSchedule& schedule, double relaxed_value,
                        double best_feasible_value) {
  double gsq = gradients.squared_norm();
  schedule.iteration++;

  bool improved = !schedule.has_bounds ||
                  best_feasible_value >
                      schedule.best_lower_bound + 1e-12 * std::max(1.0, std::abs(schedule.best_lower_bound));
  if (!schedule.has_bounds) {
    schedule.best_lower_bound = best_feasible_value;
    schedule.best_upper_bound = relaxed_value;
    schedule.has_bounds = true;
  } else {
    schedule.best_lower_bound = std::max(schedule.best_lower_bound, best_feasible_value);
    schedule.best_upper_bound = std::min(schedule.best_upper_bound, relaxed_value);
  }

  if (gsq <= 0.0) return false;  // relaxed constraints all satisfied

  double step = schedule.mu * std::max(0.0, relaxed_value - best_feasible_value) / gsq;
  for (const auto& [key, g] : gradients.beta) {
    double v = std::max(0.0, multipliers.beta_at(key.first, key.second) + step * g);
    if (v == 0.0)
      multipliers.beta.erase(key);
    else
      multipliers.beta[key] = v;
  }
  for (const auto& [key, g] : gradients.gamma) {
    double v = std::max(0.0, multipliers.gamma_at(key) + step * g);
    if (v == 0.0)
      multipliers.gamma.erase(key);
    else
      multipliers.gamma[key] = v;
  }
  for (const auto& [key, g] : gradients.delta) {
    double v = std::max(0.0, multipliers.delta_at(key) + step * g);
    if (v == 0.0)
      multipliers.delta.erase(key);
    else
      multipliers.delta[key] = v;
  }

  if (improved) {
    schedule.non_improving_count = 0;
  } else if (++schedule.non_improving_count >= schedule.halving_window) {
    schedule.mu *= 0.5;
    schedule.non_improving_count = 0;
  }
  return true;
}

}  // namespace oreo
