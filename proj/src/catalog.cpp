#include "oreo/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oreo {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::map<std::string, std::vector<std::string>> successors(const ConfigGraph& g) {
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& n : g.nodes) succ[n];
  for (const auto& [from, to] : g.edges) succ[from].push_back(to);
  for (auto& [n, s] : succ) std::sort(s.begin(), s.end());
  return succ;
}

std::map<std::string, int> in_degrees(const ConfigGraph& g) {
  std::map<std::string, int> deg;
  for (const auto& n : g.nodes) deg[n] = 0;
  for (const auto& [from, to] : g.edges) deg[to]++;
  return deg;
}

}  // namespace

std::vector<std::string> topological_order(const ConfigGraph& config) {
  auto succ = successors(config);
  auto deg = in_degrees(config);
  std::set<std::string> ready;
  for (const auto& [n, d] : deg)
    if (d == 0) ready.insert(n);

  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string n = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(n);
    for (const auto& m : succ[n])
      if (--deg[m] == 0) ready.insert(m);
  }
  if (order.size() != config.nodes.size())
    throw std::invalid_argument("configuration graph '" + config.id + "' contains a cycle");
  return order;
}

std::vector<std::vector<std::string>> enumerate_paths(const ConfigGraph& config) {
  topological_order(config);  // cycle guard
  auto succ = successors(config);
  auto deg = in_degrees(config);

  std::vector<std::string> sources;
  for (const auto& n : config.nodes)
    if (deg[n] == 0) sources.push_back(n);
  std::sort(sources.begin(), sources.end());

  std::vector<std::vector<std::string>> paths;
  std::vector<std::string> stack;
  auto dfs = [&](auto&& self, const std::string& n) -> void {
    stack.push_back(n);
    if (succ[n].empty()) {
      paths.push_back(stack);
    } else {
      for (const auto& m : succ[n]) self(self, m);
    }
    stack.pop_back();
  };
  for (const auto& s : sources) dfs(dfs, s);
  std::sort(paths.begin(), paths.end());
  return paths;
}

int critical_path_length(const ConfigGraph& config) {
  int best = 1;
  for (const auto& p : enumerate_paths(config)) best = std::max(best, int(p.size()));
  return best;
}

std::vector<CatalogViolation> validate_catalog(const Catalog& catalog) {
  std::vector<CatalogViolation> out;
  auto add = [&](std::string code, std::string entity, std::string detail) {
    out.push_back({std::move(code), std::move(entity), std::move(detail)});
  };

  for (const auto& [fid, fn] : catalog.functions) {
    if (fn.id != fid) add("function-id-mismatch", fid, "map key does not match spec id");
    if (fn.xapps.empty()) {
      add("empty-function", fid, "function has no complexity factor");
      continue;
    }
    std::set<int> chis;
    const XAppSpec* prev = nullptr;
    for (const auto& x : fn.xapps) {
      std::string ent = fid + "/chi=" + std::to_string(x.chi);
      if (x.function_id != fid) add("xapp-function-mismatch", ent, "xapp references a different function");
      if (x.chi <= 0) add("bad-complexity-label", ent, "chi must be a positive integer");
      if (!chis.insert(x.chi).second) add("duplicate-complexity-label", ent, "chi repeated within function");
      if (!finite_positive(x.theta)) add("bad-theta", ent, "theta must be > 0");
      if (!(x.q_base > 0.0 && x.q_base <= 1.0)) add("bad-q-base", ent, "q_base must lie in (0, 1]");
      if (x.mem_req < 0 || x.disk_req < 0) add("bad-footprint", ent, "mem/disk requirements must be >= 0");
      if (prev) {
        if (x.chi < prev->chi) add("unsorted-complexity", ent, "xapps must be ordered by ascending chi");
        if (x.q_base < prev->q_base)
          add("non-monotone-complexity", ent, "q_base must be non-decreasing in chi");
        if (x.theta > prev->theta)
          add("non-monotone-complexity", ent, "theta must be non-increasing in chi");
      }
      prev = &x;
    }
  }

  for (const auto& [sid, svc] : catalog.services) {
    if (svc.id != sid) add("service-id-mismatch", sid, "map key does not match spec id");
    if (!finite_positive(svc.priority)) add("bad-priority", sid, "priority must be > 0");
    if (!finite_positive(svc.target_latency)) add("bad-target-latency", sid, "target latency must be > 0");
    if (!(svc.target_quality > 0.0 && svc.target_quality <= 1.0))
      add("bad-target-quality", sid, "target quality must lie in (0, 1]");
    if (!finite_positive(svc.input_rate)) add("bad-input-rate", sid, "input rate must be > 0");
    if (svc.configs.empty()) add("no-configurations", sid, "service needs at least one configuration");

    std::set<std::string> config_ids;
    for (const auto& cfg : svc.configs) {
      std::string ent = sid + "/" + cfg.id;
      if (!config_ids.insert(cfg.id).second) add("duplicate-config-id", ent, "config id repeated within service");
      if (cfg.nodes.empty()) {
        add("empty-config", ent, "configuration has no nodes");
        continue;
      }
      std::set<std::string> nodeset(cfg.nodes.begin(), cfg.nodes.end());
      if (nodeset.size() != cfg.nodes.size()) add("duplicate-node", ent, "node listed twice");
      for (const auto& n : cfg.nodes)
        if (!catalog.functions.count(n))
          add("dangling-function-reference", ent, "config references unknown function '" + n + "'");
      bool edges_ok = true;
      for (const auto& [from, to] : cfg.edges) {
        if (!nodeset.count(from) || !nodeset.count(to)) {
          add("edge-outside-config", ent, "edge (" + from + " -> " + to + ") leaves the node set");
          edges_ok = false;
        }
      }
      if (edges_ok) {
        try {
          topological_order(cfg);
        } catch (const std::invalid_argument&) {
          add("cyclic-config", ent, "configuration graph has a cycle");
        }
      }
    }
  }

  for (int k = 0; k < kResourceCount; ++k)
    if (!finite_positive(catalog.budget[k]))
      add("bad-budget", resource_name(k), "budget must be strictly positive componentwise");

  return out;
}

}  // namespace oreo
