// Builders for compact micro-catalogs and assignments used across the tests.
#pragma once

#include <string>
#include <vector>

#include "oreo/ric_state.hpp"
#include "oreo/scenario.hpp"

namespace testsup {

inline oreo::XAppSpec xapp(const std::string& fid, int chi, double theta, double q,
                           double mem = 0.01, double disk = 0.01) {
  oreo::XAppSpec x;
  x.function_id = fid;
  x.chi = chi;
  x.theta = theta;
  x.q_base = q;
  x.mem_req = mem;
  x.disk_req = disk;
  return x;
}

inline oreo::FunctionSpec fn(const std::string& id, std::vector<oreo::XAppSpec> xapps) {
  oreo::FunctionSpec f;
  f.id = id;
  f.xapps = std::move(xapps);
  return f;
}

inline oreo::ConfigGraph cfg(const std::string& id, std::vector<std::string> nodes,
                             std::vector<std::pair<std::string, std::string>> edges = {}) {
  oreo::ConfigGraph c;
  c.id = id;
  c.nodes = std::move(nodes);
  c.edges = std::move(edges);
  return c;
}

inline oreo::ServiceSpec svc(const std::string& id, double priority, double target_latency,
                             double target_quality, double rate,
                             std::vector<oreo::ConfigGraph> configs) {
  oreo::ServiceSpec s;
  s.id = id;
  s.priority = priority;
  s.target_latency = target_latency;
  s.target_quality = target_quality;
  s.input_rate = rate;
  s.configs = std::move(configs);
  return s;
}

inline oreo::Catalog catalog(std::vector<oreo::FunctionSpec> functions,
                             std::vector<oreo::ServiceSpec> services,
                             oreo::ResourceVector budget = {100.0, 1.0, 1.0}) {
  oreo::Catalog c;
  for (auto& f : functions) c.functions[f.id] = std::move(f);
  for (auto& s : services) c.services[s.id] = std::move(s);
  c.budget = budget;
  return c;
}

// One service, one single-node configuration over one function.
inline oreo::Catalog single_service_catalog(double priority = 1.0, double target_latency = 0.5,
                                            double target_quality = 0.8, double rate = 1.0,
                                            double theta = 1.0, double q_base = 0.9) {
  return catalog({fn("f1", {xapp("f1", 1, theta, q_base)})},
                 {svc("s1", priority, target_latency, target_quality, rate, {cfg("c1", {"f1"})})});
}

}  // namespace testsup
