#include "oreo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oreo/performance.hpp"
#include "oreo/repair.hpp"

namespace oreo {

namespace {

std::string padded(const char* prefix, int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%s%02d", prefix, n);
  return buf;
}

}  // namespace

ScenarioParams ScenarioParams::for_scale(const std::string& scale, std::uint64_t seed) {
  ScenarioParams p;
  p.scale = scale;
  p.seed = seed;
  if (scale == "S") {
    p.num_services = 8;
    p.num_functions = 8;
    p.num_levels = 2;
  } else if (scale == "M") {
    p.num_services = 8;
    p.num_functions = 8;
    p.num_levels = 3;
  } else if (scale == "L") {
    p.num_services = 10;
    p.num_functions = 8;
    p.num_levels = 3;
  } else if (scale == "XL") {
    p.num_services = 12;
    p.num_functions = 10;
    p.num_levels = 3;
  } else {
    throw std::invalid_argument("unknown scale '" + scale + "' (expected S, M, L or XL)");
  }
  return p;
}

Catalog generate_scenario(const ScenarioParams& params) {
  Rng rng(params.seed);
  Catalog catalog;
  catalog.meta.seed = params.seed;
  catalog.meta.scale = params.scale;
  catalog.budget.mem = params.storage_budget;
  catalog.budget.disk = params.storage_budget;

  for (int fi = 1; fi <= params.num_functions; ++fi) {
    FunctionSpec fn;
    fn.id = padded("f", fi);
    double theta_base = rng.uniform(params.theta_min, params.theta_max);
    double u = rng.uniform();
    double mem_base = rng.uniform(params.footprint_min, params.footprint_max) * params.storage_budget;
    double disk_base = rng.uniform(params.footprint_min, params.footprint_max) * params.storage_budget;
    for (int chi = 1; chi <= params.num_levels; ++chi) {
      XAppSpec x;
      x.function_id = fn.id;
      x.chi = chi;
      x.theta = theta_base / (1.0 + params.theta_damping * (chi - 1));
      x.q_base = 1.0 - u * params.quality_spread / std::sqrt(double(chi));
      double growth = std::pow(params.footprint_growth, chi - 1);
      x.mem_req = mem_base * growth;
      x.disk_req = disk_base * growth;
      fn.xapps.push_back(x);
    }
    catalog.functions[fn.id] = fn;
  }

  std::vector<std::string> function_ids;
  for (const auto& [fid, fn] : catalog.functions) function_ids.push_back(fid);

  double solo_cpu_estimate = 0.0;
  for (int si = 1; si <= params.num_services; ++si) {
    ServiceSpec svc;
    svc.id = padded("s", si);
    svc.input_rate = rng.uniform(params.rate_min, params.rate_max);
    svc.priority = rng.pick(params.priorities);
    svc.target_latency = rng.pick(params.latency_targets);

    int config_count = rng.uniform_int(1, params.configs_per_service);
    for (int ci = 1; ci <= config_count; ++ci) {
      ConfigGraph cfg;
      cfg.id = padded("c", ci);
      int node_count = rng.uniform_int(1, params.max_functions_per_config);

      std::vector<std::string> pool = function_ids;
      for (int n = 0; n < node_count; ++n) {
        int at = rng.uniform_int(0, int(pool.size()) - 1);
        cfg.nodes.push_back(pool[at]);
        pool.erase(pool.begin() + at);
      }
      std::sort(cfg.nodes.begin(), cfg.nodes.end());
      // forward edges only: acyclic by construction
      for (std::size_t i = 0; i < cfg.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.nodes.size(); ++j)
          if (rng.uniform() < 0.5) cfg.edges.push_back({cfg.nodes[i], cfg.nodes[j]});
      svc.configs.push_back(std::move(cfg));
    }

    // Quality target drawn from the menu restricted to what the drawn
    // configurations can reach at maximal complexity, so that scarcity comes
    // from the resource budget rather than from unreachable targets.
    double best_reachable = 0.0;
    for (const auto& cfg : svc.configs) {
      std::map<std::string, const XAppSpec*> chosen;
      for (const auto& n : cfg.nodes) chosen[n] = &catalog.functions.at(n).max_complexity();
      best_reachable = std::max(best_reachable, config_quality(cfg, chosen).sink_quality);
    }
    std::vector<double> menu;
    for (double q : params.quality_targets)
      if (q <= best_reachable + 1e-12) menu.push_back(q);
    svc.target_quality = menu.empty() ? params.quality_targets.front() : rng.pick(menu);

    // exclusive-deployment CPU estimate (mean over configurations) used for
    // budget sizing
    double per_service = 0.0;
    for (const auto& cfg : svc.configs) {
      double t_node = svc.target_latency / critical_path_length(cfg);
      double cfg_cpu = 0.0;
      for (const auto& n : cfg.nodes) {
        const auto& fn = catalog.functions.at(n);
        const XAppSpec* pick = &fn.xapps.back();
        for (const auto& x : fn.xapps)
          if (x.q_base >= svc.target_quality) {
            pick = &x;
            break;
          }
        cfg_cpu += required_cpu(pick->theta, svc.input_rate, t_node);
      }
      per_service += cfg_cpu / double(svc.configs.size());
    }
    solo_cpu_estimate += per_service;

    catalog.services[svc.id] = std::move(svc);
  }

  catalog.budget.cpu = params.cpu_budget_factor * solo_cpu_estimate;
  return catalog;
}

Catalog canned_testbed_scenario() {
  Catalog catalog;
  catalog.meta.scale = "testbed";
  catalog.budget = {40.0, 1.0, 1.0};

  auto make_fn = [&](const std::string& id, std::vector<double> theta, std::vector<double> q,
                     double mem, double disk) {
    FunctionSpec fn;
    fn.id = id;
    for (int chi = 1; chi <= 3; ++chi) {
      XAppSpec x;
      x.function_id = id;
      x.chi = chi;
      x.theta = theta[chi - 1];
      x.q_base = q[chi - 1];
      x.mem_req = mem * std::pow(1.2, chi - 1);
      x.disk_req = disk * std::pow(1.2, chi - 1);
      fn.xapps.push_back(x);
    }
    catalog.functions[id] = fn;
  };
  make_fn("f1", {2.0, 1.4, 1.0}, {0.90, 0.93, 0.96}, 0.020, 0.030);
  make_fn("f2", {2.5, 1.8, 1.2}, {0.75, 0.85, 0.92}, 0.025, 0.035);
  make_fn("f3", {1.6, 1.2, 0.9}, {0.70, 0.85, 0.93}, 0.030, 0.040);

  {
    ServiceSpec svc;  // traffic forecasting
    svc.id = "forecasting";
    svc.priority = 2.0;
    svc.target_latency = 0.5;
    svc.target_quality = 0.925;  // menu: 0.9, 0.925, 0.95
    svc.input_rate = 5.0;
    svc.configs.push_back({"c1", {"f1"}, {}});
    catalog.services[svc.id] = svc;
  }
  {
    ServiceSpec svc;  // traffic classification
    svc.id = "classification";
    svc.priority = 1.0;
    svc.target_latency = 0.2;
    svc.target_quality = 0.8;  // menu: 0.7, 0.8, 0.9
    svc.input_rate = 8.0;
    svc.configs.push_back({"c1", {"f2"}, {}});
    catalog.services[svc.id] = svc;
  }
  {
    ServiceSpec svc;  // network slicing
    svc.id = "slicing";
    svc.priority = 3.0;
    svc.target_latency = 0.1;
    svc.target_quality = 0.8;  // menu: 0.6, 0.8, 0.9
    svc.input_rate = 3.0;
    svc.configs.push_back({"c1", {"f1", "f2", "f3"}, {{"f1", "f3"}, {"f2", "f3"}}});
    svc.configs.push_back({"c2", {"f1", "f3"}, {{"f1", "f3"}}});
    svc.configs.push_back({"c3", {"f2", "f3"}, {{"f2", "f3"}}});
    svc.configs.push_back({"c4", {"f3"}, {}});
    catalog.services[svc.id] = svc;
  }
  return catalog;
}

std::vector<std::string> EpochSequence::active(int epoch) const {
  std::vector<std::string> out;
  for (int e = std::max(0, epoch - lifetime + 1); e <= epoch && e < int(arrivals.size()); ++e)
    for (const auto& id : arrivals[e]) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> EpochSequence::departures(int epoch) const {
  int born = epoch - lifetime;
  if (born < 0 || born >= int(arrivals.size())) return {};
  return arrivals[born];
}

EpochSequence make_epoch_sequence(const Catalog& catalog, int epochs, int lifetime,
                                  std::uint64_t seed) {
  if (epochs < 1 || lifetime < 1) throw std::invalid_argument("epochs and lifetime must be >= 1");
  EpochSequence seq;
  seq.epochs = epochs;
  seq.lifetime = lifetime;
  seq.arrivals.assign(epochs, {});
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (const auto& [sid, svc] : catalog.services)
    seq.arrivals[rng.uniform_int(0, epochs - 1)].push_back(sid);
  for (auto& wave : seq.arrivals) std::sort(wave.begin(), wave.end());
  return seq;
}

}  // namespace oreo
