#include "oreo/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "oreo/repair.hpp"

namespace oreo {

namespace {

struct Monolith {
  const ConfigGraph* cfg = nullptr;
  std::vector<std::pair<std::string, int>> levels;  // (function, chi), sorted
  double quality = 0.0;
  ResourceVector demand;  // fixed allocation, sized for this service alone
};

std::vector<Monolith> candidates(const Catalog& catalog, const ServiceSpec& svc) {
  std::vector<Monolith> out;
  std::vector<const ConfigGraph*> cfgs;
  for (const auto& cfg : svc.configs) cfgs.push_back(&cfg);
  std::sort(cfgs.begin(), cfgs.end(),
            [](const ConfigGraph* a, const ConfigGraph* b) { return a->id < b->id; });

  for (const ConfigGraph* cfg : cfgs) {
    std::vector<std::string> nodes = cfg->nodes;
    std::sort(nodes.begin(), nodes.end());
    double t_node = node_latency_target(svc, *cfg);

    std::vector<int> idx(nodes.size(), 0);
    while (true) {
      std::map<std::string, const XAppSpec*> chosen;
      bool valid = true;
      for (std::size_t i = 0; i < nodes.size() && valid; ++i) {
        const auto& xapps = catalog.functions.at(nodes[i]).xapps;
        if (idx[i] >= int(xapps.size()))
          valid = false;
        else
          chosen[nodes[i]] = &xapps[idx[i]];
      }
      if (valid) {
        double q = config_quality(*cfg, chosen).sink_quality;
        if (q + kFeasTol >= svc.target_quality) {
          Monolith m;
          m.cfg = cfg;
          m.quality = q;
          for (const auto& n : nodes) {
            const XAppSpec* spec = chosen.at(n);
            m.levels.push_back({n, spec->chi});
            m.demand.cpu += required_cpu(spec->theta, svc.input_rate, t_node);
            m.demand.mem += spec->mem_req;
            m.demand.disk += spec->disk_req;
          }
          out.push_back(std::move(m));
        }
      }
      std::size_t i = 0;
      while (i < idx.size()) {
        const auto& xapps = catalog.functions.at(nodes[i]).xapps;
        if (++idx[i] < int(xapps.size())) break;
        idx[i] = 0;
        ++i;
      }
      if (i == idx.size()) break;
    }
  }
  return out;
}

double norm_demand(const ResourceVector& r, const Catalog& catalog) {
  double total = 0.0;
  for (int k = 0; k < kResourceCount; ++k) total += r[k] / catalog.budget[k];
  return total;
}

}  // namespace

OrchestrationPlan solve_baseline(const Catalog& catalog, const DeploymentState& state) {
  OrchestrationPlan plan;
  plan.stop_reason = StopReason::kGap;

  std::vector<const ServiceSpec*> order;
  for (const auto& [sid, svc] : catalog.services) order.push_back(&svc);
  std::stable_sort(order.begin(), order.end(), [](const ServiceSpec* a, const ServiceSpec* b) {
    if (a->priority != b->priority) return a->priority > b->priority;
    return a->id < b->id;
  });

  Assignment a;
  for (const ServiceSpec* svc : order) {
    auto mono = candidates(catalog, *svc);
    if (mono.empty()) continue;

    // highest quality first; cheaper on ties, then stable by enumeration order
    std::stable_sort(mono.begin(), mono.end(), [&](const Monolith& x, const Monolith& y) {
      if (x.quality != y.quality) return x.quality > y.quality;
      return norm_demand(x.demand, catalog) < norm_demand(y.demand, catalog);
    });

    for (const auto& m : mono) {
      Assignment trial = a;
      ConfigKey key{svc->id, m.cfg->id};
      trial.selected.insert(key);
      double t_node = node_latency_target(*svc, *m.cfg);
      for (const auto& [f, chi] : m.levels) {
        const XAppSpec* spec = catalog.xapp(f, chi);
        int replica = 0;
        while (trial.rho.count({f, chi, replica})) ++replica;
        InstanceId inst{f, chi, replica};
        trial.uses.insert({key, inst});
        trial.rho[inst] = {required_cpu(spec->theta, svc->input_rate, t_node), spec->mem_req,
                           spec->disk_req};
      }
      trial = canonicalize_replicas(trial, state, catalog);

      bool fits = true;
      for (int k = 0; k < kResourceCount && fits; ++k) {
        double total = 0.0;
        for (const auto& [inst, rho] : trial.rho) total += rho[k];
        if (total > catalog.budget[k] * (1.0 + kFeasTol)) fits = false;
      }
      if (fits) {
        auto [f1, f2] = transition_sets(state, trial);
        fits = transition_budget_check(f1, f2, state, trial, catalog).empty();
      }
      if (fits) {
        a = std::move(trial);
        break;
      }
    }
  }

  plan.assignment = canonicalize_replicas(a, state, catalog);
  plan.objective = objective(plan.assignment, catalog);
  plan.upper_bound = plan.objective;
  plan.iterations = 1;
  return plan;
}

}  // namespace oreo
