// Static problem universe: RAN functions with complexity-tunable xApp
// implementations, services with candidate configuration DAGs, and the
// near-RT RIC resource budget. Immutable after construction; safe to share
// read-only across concurrent solver runs.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oreo {

inline constexpr int kResourceCount = 3;  // cpu, mem, disk

// Queue stability guard: deployed instances must satisfy
// rho_cpu * theta >= lambda * (1 + kStabilityMargin).
inline constexpr double kStabilityMargin = 1e-9;

// Solvers size CPU against target * (1 - kLatencyMargin) so that achieved
// latency stays strictly below the target under floating point drift.
inline constexpr double kLatencyMargin = 1e-9;

// Feasibility slack below this (relative to constraint scale) is noise.
inline constexpr double kFeasTol = 1e-9;

struct ResourceVector {
  double cpu = 0.0;   // cycles/second
  double mem = 0.0;   // bytes
  double disk = 0.0;  // bytes

  double& operator[](int k) { return k == 0 ? cpu : (k == 1 ? mem : disk); }
  double operator[](int k) const { return k == 0 ? cpu : (k == 1 ? mem : disk); }

  ResourceVector& operator+=(const ResourceVector& o) {
    cpu += o.cpu;
    mem += o.mem;
    disk += o.disk;
    return *this;
  }
  friend bool operator==(const ResourceVector&, const ResourceVector&) = default;
};

inline const char* resource_name(int k) { return k == 0 ? "cpu" : (k == 1 ? "mem" : "disk"); }

// One implementation of a function at a given complexity factor.
struct XAppSpec {
  std::string function_id;
  int chi = 1;           // complexity factor label
  double theta = 1.0;    // input units processed per CPU cycle
  double q_base = 1.0;   // intrinsic output quality in (0, 1]
  double mem_req = 0.0;  // bytes
  double disk_req = 0.0; // bytes
};

struct FunctionSpec {
  std::string id;
  std::vector<XAppSpec> xapps;  // ordered by ascending chi

  const XAppSpec* find(int chi) const {
    for (const auto& x : xapps)
      if (x.chi == chi) return &x;
    return nullptr;
  }
  const XAppSpec& max_complexity() const { return xapps.back(); }
};

// Directed acyclic graph of functions realizing one service configuration.
struct ConfigGraph {
  std::string id;
  std::vector<std::string> nodes;  // function ids, sorted ascending
  std::vector<std::pair<std::string, std::string>> edges;  // (from, to)

  bool has_node(const std::string& f) const {
    for (const auto& n : nodes)
      if (n == f) return true;
    return false;
  }
};

struct ServiceSpec {
  std::string id;
  double priority = 1.0;        // p_s
  double target_latency = 1.0;  // T_s, seconds
  double target_quality = 1.0;  // Q_s, in (0, 1]
  double input_rate = 1.0;      // lambda_s, units/second
  std::vector<ConfigGraph> configs;

  const ConfigGraph* find_config(const std::string& cid) const {
    for (const auto& c : configs)
      if (c.id == cid) return &c;
    return nullptr;
  }
};

struct CatalogMeta {
  std::uint64_t seed = 0;
  std::string scale;  // "S", "M", "L", "XL", "custom", "testbed"
  int generator_version = 1;
};

struct Catalog {
  std::map<std::string, FunctionSpec> functions;
  std::map<std::string, ServiceSpec> services;
  ResourceVector budget;
  CatalogMeta meta;

  const XAppSpec* xapp(const std::string& function_id, int chi) const {
    auto it = functions.find(function_id);
    return it == functions.end() ? nullptr : it->second.find(chi);
  }
};

// Structural invariant violation; violations are data, not failures.
struct CatalogViolation {
  std::string code;    // e.g. "dangling-function-reference"
  std::string entity;  // offending entity id
  std::string detail;
};

// Checks every structural invariant and returns one descriptor per breach,
// in a stable order. An empty result means the catalog is valid.
std::vector<CatalogViolation> validate_catalog(const Catalog& catalog);

// All maximal source-to-sink paths of an acyclic configuration, each a
// function id sequence, ordered lexicographically. Throws std::invalid_argument
// on a cycle (unreachable once the catalog validated clean).
std::vector<std::vector<std::string>> enumerate_paths(const ConfigGraph& config);

// Kahn order with ties broken by ascending function id.
std::vector<std::string> topological_order(const ConfigGraph& config);

// Node count of the longest source-to-sink path (used for equal deadline
// splits). At least 1 for any valid configuration.
int critical_path_length(const ConfigGraph& config);

}  // namespace oreo
