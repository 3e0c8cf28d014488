#include "oreo/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oreo/performance.hpp"

namespace oreo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Continuous subproblem. Work in node-latency space y_i = l_i: minimizing
// sum_i w_i (lambda_i + 1/y_i) / theta_i subject to per-path sum_{i in r} y_i
// <= T_r is convex; blocks are solved by capped water-filling and polished by
// single-coordinate maximization.
// ---------------------------------------------------------------------------

struct CpuSystem {
  std::vector<InstanceId> ids;
  std::vector<double> theta;
  std::vector<double> lambda;
  std::vector<std::vector<int>> rows;  // instance indexes per path constraint
  std::vector<double> row_budget;      // T_eff per path constraint
  std::vector<std::vector<int>> rows_of;  // constraint indexes per instance
};

CpuSystem build_cpu_system(const Assignment& skeleton, const Catalog& catalog) {
  CpuSystem sys;
  std::map<InstanceId, int> index;
  for (const auto& [key, inst] : skeleton.uses) {
    if (!skeleton.selected.count(key)) continue;
    if (!index.count(inst)) {
      index[inst] = int(sys.ids.size());
      sys.ids.push_back(inst);
      sys.theta.push_back(catalog.xapp(inst.function_id, inst.chi)->theta);
      sys.lambda.push_back(0.0);
    }
  }
  for (int i = 0; i < int(sys.ids.size()); ++i)
    sys.lambda[i] = aggregate_load(sys.ids[i], skeleton, catalog);

  for (const auto& key : skeleton.selected) {
    const auto& svc = catalog.services.at(key.service);
    const ConfigGraph& cfg = *svc.find_config(key.config);
    std::map<std::string, int> node_index;
    for (const auto& [k, inst] : skeleton.uses)
      if (k == key) node_index[inst.function_id] = index.at(inst);
    double t_eff = svc.target_latency * (1.0 - kLatencyMargin);
    for (const auto& path : enumerate_paths(cfg)) {
      std::vector<int> row;
      for (const auto& n : path) row.push_back(node_index.at(n));
      sys.rows.push_back(std::move(row));
      sys.row_budget.push_back(t_eff);
    }
  }
  sys.rows_of.assign(sys.ids.size(), {});
  for (int r = 0; r < int(sys.rows.size()); ++r)
    for (int i : sys.rows[r]) sys.rows_of[i].push_back(r);
  return sys;
}

double row_slack(const CpuSystem& sys, const std::vector<double>& y, int r) {
  double used = 0.0;
  for (int i : sys.rows[r]) used += y[i];
  return sys.row_budget[r] - used;
}

// Capped water-filling for one row: y_i = min(cap_i, sqrt(w_i / nu)) with nu
// chosen so the budget is met.
void waterfill_row(const std::vector<double>& weight, const std::vector<double>& cap,
                   double budget, std::vector<double>& y_out) {
  int n = int(weight.size());
  double cap_sum = 0.0;
  bool all_finite = true;
  for (double c : cap) {
    if (!std::isfinite(c)) all_finite = false;
    cap_sum += std::isfinite(c) ? c : 0.0;
  }
  if (all_finite && cap_sum <= budget) {
    y_out = cap;
    return;
  }
  double lo = 1e-30, hi = 1e30;
  for (int iter = 0; iter < 200; ++iter) {
    double nu = std::sqrt(lo * hi);
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      total += std::min(cap[i], weight[i] > 0 ? std::sqrt(weight[i] / nu) : 0.0);
    if (total > budget)
      lo = nu;
    else
      hi = nu;
  }
  double nu = std::sqrt(lo * hi);
  for (int i = 0; i < n; ++i)
    y_out[i] = std::min(cap[i], weight[i] > 0 ? std::sqrt(weight[i] / nu) : 0.0);
}

// Minimize sum_i w_i / y_i over the row polytope.
std::vector<double> solve_latency_split(const CpuSystem& sys, const std::vector<double>& weight) {
  int n = int(sys.ids.size());
  std::vector<double> y(n, kInf);
  for (int i = 0; i < n; ++i)
    for (int r : sys.rows_of[i])
      y[i] = std::min(y[i], sys.row_budget[r] / double(sys.rows[r].size()));

  for (int cycle = 0; cycle < 400; ++cycle) {
    double max_rel_change = 0.0;

    for (int r = 0; r < int(sys.rows.size()); ++r) {
      const auto& members = sys.rows[r];
      int m = int(members.size());
      std::vector<double> w(m), cap(m), out(m);
      for (int j = 0; j < m; ++j) {
        int i = members[j];
        w[j] = weight[i];
        cap[j] = kInf;
        for (int r2 : sys.rows_of[i]) {
          if (r2 == r) continue;
          int overlap = 0;
          for (int j2 = 0; j2 < m; ++j2) {
            int i2 = members[j2];
            for (int r3 : sys.rows_of[i2])
              if (r3 == r2) {
                overlap++;
                break;
              }
          }
          cap[j] = std::min(cap[j], y[i] + row_slack(sys, y, r2) / std::max(1, overlap));
        }
      }
      waterfill_row(w, cap, sys.row_budget[r], out);
      for (int j = 0; j < m; ++j) {
        int i = members[j];
        double before = y[i];
        y[i] = out[j];
        if (std::isfinite(before) && before > 0)
          max_rel_change = std::max(max_rel_change, std::abs(y[i] - before) / before);
        else if (before != y[i])
          max_rel_change = 1.0;
      }
    }

    // single-coordinate maximization: push each latency to its feasibility
    // boundary (strictly lowers CPU, never violates)
    for (int i = 0; i < n; ++i) {
      double room = kInf;
      for (int r : sys.rows_of[i]) room = std::min(room, row_slack(sys, y, r));
      if (std::isfinite(room) && room > 0) {
        double before = y[i];
        y[i] += room;
        if (before > 0) max_rel_change = std::max(max_rel_change, room / before);
      }
    }

    if (max_rel_change < 1e-12) break;
  }
  return y;
}

double total_cpu(const CpuSystem& sys, const std::vector<double>& y,
                 const std::vector<bool>& mask) {
  double total = 0.0;
  for (int i = 0; i < int(sys.ids.size()); ++i)
    if (mask.empty() || mask[i]) total += (sys.lambda[i] + 1.0 / y[i]) / sys.theta[i];
  return total;
}

}  // namespace

MinCpuResult min_cpu_allocation(const Assignment& skeleton, const DeploymentState& state,
                                const Catalog& catalog) {
  MinCpuResult result;
  CpuSystem sys = build_cpu_system(skeleton, catalog);
  int n = int(sys.ids.size());
  if (n == 0) {
    result.feasible = true;
    return result;
  }

  std::vector<double> base_weight(n);
  for (int i = 0; i < n; ++i) base_weight[i] = 1.0 / sys.theta[i];

  auto y = solve_latency_split(sys, base_weight);

  // Transition CPU cap: allocations of instances serving continuing services
  // co-exist with carried-over allocations of instances they replace.
  auto [f1, f2] = transition_sets(state, skeleton);
  std::vector<bool> in_f2(n, false);
  bool any_f2 = false;
  for (int i = 0; i < n; ++i)
    if (f2.count(sys.ids[i])) in_f2[i] = any_f2 = true;
  double carried = 0.0;
  for (const auto& inst : f1) {
    if (f2.count(inst)) continue;
    if (auto it = state.previous.rho.find(inst); it != state.previous.rho.end())
      carried += it->second.cpu;
  }
  double room = catalog.budget.cpu - carried;

  if (any_f2 && total_cpu(sys, y, in_f2) > room * (1.0 + kFeasTol)) {
    // Re-balance: penalize transition-side CPU with weight (1 + omega) and
    // bisect omega until the cap binds, or declare infeasibility when even an
    // overwhelming penalty cannot meet it.
    auto weighted = [&](double omega) {
      std::vector<double> w = base_weight;
      for (int i = 0; i < n; ++i)
        if (in_f2[i]) w[i] *= (1.0 + omega);
      return solve_latency_split(sys, w);
    };
    auto y_hard = weighted(1e12);
    if (total_cpu(sys, y_hard, in_f2) > room * (1.0 + kFeasTol)) {
      result.feasible = false;
      return result;
    }
    double lo = 0.0, hi = 1e12;
    for (int iter = 0; iter < 60; ++iter) {
      double omega = (lo + hi) / 2.0;
      auto y_try = weighted(omega);
      if (total_cpu(sys, y_try, in_f2) > room)
        lo = omega;
      else {
        hi = omega;
        y = y_try;
      }
    }
    if (total_cpu(sys, y, in_f2) > room * (1.0 + kFeasTol)) y = y_hard;
  }

  result.feasible = true;
  for (int i = 0; i < n; ++i)
    result.cpu[sys.ids[i]] = (sys.lambda[i] + 1.0 / y[i]) / sys.theta[i];
  return result;
}


}  // namespace oreo
