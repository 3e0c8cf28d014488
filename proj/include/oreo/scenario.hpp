// Seeded scenario generation (S/M/L/XL presets and custom), the canned
// three-service testbed catalog, and the request-epoch replay schedule.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "oreo/catalog.hpp"

namespace oreo {

// Deterministic RNG with explicit distributions; identical sequences on any
// platform for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + int(gen_() % std::uint64_t(hi - lo + 1));
  }
  template <typename T>
  const T& pick(const std::vector<T>& values) {
    return values[uniform_int(0, int(values.size()) - 1)];
  }

 private:
  std::mt19937_64 gen_;
};

struct ScenarioParams {
  std::string scale = "S";  // S, M, L, XL or custom
  int num_services = 8;
  int num_functions = 8;
  int num_levels = 2;
  int configs_per_service = 3;       // at most 3
  int max_functions_per_config = 4;  // at most 4

  // distribution bounds (defaults match the documented generator)
  double theta_min = 0.5, theta_max = 2.0;  // units per cycle at chi = 1
  double theta_damping = 0.3;               // theta /= 1 + damping (chi - 1)
  double quality_spread = 0.4;              // q = 1 - u spread / sqrt(chi)
  double footprint_min = 0.01, footprint_max = 0.04;  // fraction of storage budget
  double footprint_growth = 1.2;                      // per chi step
  double rate_min = 1.0, rate_max = 10.0;
  std::vector<double> priorities = {1.0, 2.0, 3.0};
  std::vector<double> latency_targets = {0.1, 0.2, 0.5};
  std::vector<double> quality_targets = {0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};

  double storage_budget = 1.0;
  // CPU budget = factor x the summed exclusive-deployment CPU estimate;
  // calibrated so the optimum deploys most-but-not-all services at S/M scale.
  double cpu_budget_factor = 0.55;

  std::uint64_t seed = 1;

  static ScenarioParams for_scale(const std::string& scale, std::uint64_t seed);
};

Catalog generate_scenario(const ScenarioParams& params);

// Fixed desk catalog with the three classic services: traffic forecasting
// (one configuration), traffic classification (one configuration), and
// network slicing (four configurations over f1, f2, f3).
Catalog canned_testbed_scenario();

// Service arrival/departure schedule; a service departs exactly `lifetime`
// epochs after it arrives.
struct EpochSequence {
  int epochs = 1;
  int lifetime = 2;
  std::vector<std::vector<std::string>> arrivals;  // per epoch, sorted

  std::vector<std::string> active(int epoch) const;
  std::vector<std::string> departures(int epoch) const;
};

EpochSequence make_epoch_sequence(const Catalog& catalog, int epochs, int lifetime,
                                  std::uint64_t seed);

}  // namespace oreo
