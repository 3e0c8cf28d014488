// Relaxation core: constraint split with big-M linearization, the Lagrangian
// function, the exact configuration-selection subproblem (LR1), the greedy
// instantiation/reservation subproblem (LR2), subgradients, and the Polyak
// step multiplier update.
#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>

#include "oreo/ric_state.hpp"

namespace oreo {

// Non-negative penalty vectors. Missing entries read as zero.
struct Multipliers {
  std::map<std::pair<ConfigKey, std::string>, double> beta;  // coverage, per (config, function)
  std::map<ConfigKey, double> gamma;                         // quality, per config
  std::map<ConfigKey, double> delta;                         // latency, per config

  double beta_at(const ConfigKey& key, const std::string& function_id) const {
    auto it = beta.find({key, function_id});
    return it == beta.end() ? 0.0 : it->second;
  }
  double gamma_at(const ConfigKey& key) const {
    auto it = gamma.find(key);
    return it == gamma.end() ? 0.0 : it->second;
  }
  double delta_at(const ConfigKey& key) const {
    auto it = delta.find(key);
    return it == delta.end() ? 0.0 : it->second;
  }
};

// Subgradient step-size schedule with halving on stagnation.
struct StepSchedule {
  double mu = 2.0;
  double best_lower_bound = 0.0;
  double best_upper_bound = 0.0;
  bool has_bounds = false;
  int non_improving_count = 0;
  int halving_window = 5;  // N
  int iteration = 0;
};

// Output of one LR round. The point may violate the relaxed constraints
// (coverage, quality, linearized latency) but honors the retained ones.
struct RelaxedSolution {
  Assignment point;
  double lagrangian_value = 0.0;  // Psi_L evaluated at the point
  double psi_l1 = 0.0;
  double psi_l2 = 0.0;
  double dual_bound = 0.0;  // certified upper bound on the dual at these multipliers
};

// Big-M for the latency linearization: 100 x the largest latency target,
// 0 for an empty service set.
double big_m(const Catalog& catalog);

struct LagrangianValue {
  double total = 0.0;
  double part1 = 0.0;  // Psi_L1: configuration-selection terms
  double part2 = 0.0;  // Psi_L2: instantiation / reservation terms
};

// Psi_L at an arbitrary point. Partially covered configurations are scored
// with pass-through quality (uncovered functions forward their input; a
// configuration with nothing deployed produces no output, quality 0) and
// with path latency summed over deployed nodes only, saturated at big-M per
// node for unstable queues.
LagrangianValue lagrangian_value(const Assignment& point, const Multipliers& multipliers,
                                 const Catalog& catalog);

struct Lr1Result {
  std::set<ConfigKey> selected;
  double value = 0.0;  // exact maximum of Psi_L1 under the per-service choice constraint
};

// Exact LR1: per service pick the configuration maximizing
// p_s - gamma Q_s - M delta - sum beta, selected only when positive,
// ties to the lowest configuration id.
Lr1Result solve_lr1(const Multipliers& multipliers, const Catalog& catalog);

struct Lr2Result {
  std::set<std::pair<ConfigKey, InstanceId>> uses;
  std::map<InstanceId, ResourceVector> rho;
  double bound = 0.0;  // certified upper bound on the LR2 optimum
};

// Greedy LR2: every (service, configuration, function) triple independently
// picks its best candidate (complexity level x share-or-new) by marginal
// value, with per-instance CPU from the closed-form trade-off
// rho* = (lambda + sqrt(delta_eff theta K B_cpu)) / theta, then fits the
// retained budget and transition constraints by dropping the cheapest
// selections (storage) and scaling CPU.
Lr2Result solve_lr2(const Multipliers& multipliers, const DeploymentState& state,
                    const Catalog& catalog);

struct Subgradients {
  std::map<std::pair<ConfigKey, std::string>, double> beta;
  std::map<ConfigKey, double> gamma;
  std::map<ConfigKey, double> delta;

  double squared_norm() const;
};

// Constraint violation directions at the relaxed point: coverage gap for
// beta, quality gap for gamma, linearized latency gap for delta.
Subgradients subgradients(const RelaxedSolution& relaxed, const Catalog& catalog);

// Projected Polyak step: m <- max(0, m + mu (UB - LB) / ||g||^2 * g).
// Returns false (no update) when the subgradient vanishes. Halves mu after
// `halving_window` consecutive iterations without lower-bound improvement.
bool update_multipliers(Multipliers& multipliers, const Subgradients& gradients,
                        StepSchedule& schedule, double relaxed_value,
                        double best_feasible_value);

// Closed-form minimizer of rho/(K B_cpu) + delta_eff / (rho theta - lambda)
// over stable rho (exposed for verification against a numeric scan).
double lr2_cpu_star(double delta_eff, double theta, double lambda_total, double k_times_bcpu);

}  // namespace oreo
