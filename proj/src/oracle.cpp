#include "oreo/oracle.hpp"

#include "oreo/allocation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace oreo {

// ---------------------------------------------------------------------------
// Discrete enumeration
// ---------------------------------------------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ServiceOption {
  const ConfigGraph* cfg = nullptr;  // nullptr = service not deployed
  std::vector<std::pair<std::string, int>> levels;  // (function, chi) sorted by function
  double order_score = 0.0;
};

struct GroupLoad {
  double lambda = 0.0;
  double inv_t = 0.0;  // max over users of 1/T_eff
  int count = 0;
};

struct SearchContext {
  const Catalog* catalog = nullptr;
  const DeploymentState* state = nullptr;
  OracleLimits limits;
  std::vector<std::string> service_ids;
  std::vector<const ServiceSpec*> services;
  std::vector<std::vector<ServiceOption>> options;
  std::vector<double> suffix_gain;  // optimistic value of undecided services

  std::map<std::pair<std::string, int>, GroupLoad> group;
  std::map<std::pair<std::string, int>, std::vector<GroupLoad>> group_stack;
  double storage_lb = 0.0;

  double incumbent = 0.0;  // empty assignment is feasible
  Assignment best;
  std::string best_encoding;
  bool have_best = false;

  std::int64_t nodes = 0;
  bool exceeded = false;
  std::chrono::steady_clock::time_point deadline;

  std::vector<int> choice;
};

bool count_node(SearchContext& ctx) {
  if (ctx.exceeded) return false;
  if (++ctx.nodes > ctx.limits.max_nodes) {
    ctx.exceeded = true;
    return false;
  }
  if ((ctx.nodes & 1023) == 0 && std::chrono::steady_clock::now() > ctx.deadline) {
    ctx.exceeded = true;
    return false;
  }
  return true;
}

double cpu_lower_bound(const SearchContext& ctx) {
  double cpu = 0.0;
  for (const auto& [fc, load] : ctx.group) {
    if (load.count <= 0) continue;
    const XAppSpec* spec = ctx.catalog->xapp(fc.first, fc.second);
    cpu += (load.lambda + load.inv_t) / spec->theta;
  }
  return cpu;
}

void push_option(SearchContext& ctx, int svc_idx, const ServiceOption& opt) {
  if (!opt.cfg) return;
  const ServiceSpec& svc = *ctx.services[svc_idx];
  double inv_t = 1.0 / (svc.target_latency * (1.0 - kLatencyMargin));
  for (const auto& [f, chi] : opt.levels) {
    auto& g = ctx.group[{f, chi}];
    ctx.group_stack[{f, chi}].push_back(g);
    if (g.count == 0) {
      const XAppSpec* spec = ctx.catalog->xapp(f, chi);
      ctx.storage_lb += spec->mem_req / ctx.catalog->budget.mem +
                        spec->disk_req / ctx.catalog->budget.disk;
    }
    g.lambda += svc.input_rate;
    g.inv_t = std::max(g.inv_t, inv_t);
    g.count++;
  }
}

void pop_option(SearchContext& ctx, int svc_idx, const ServiceOption& opt) {
  (void)svc_idx;
  if (!opt.cfg) return;
  for (auto it = opt.levels.rbegin(); it != opt.levels.rend(); ++it) {
    const auto& [f, chi] = *it;
    auto& stack = ctx.group_stack[{f, chi}];
    GroupLoad prev = stack.back();
    stack.pop_back();
    if (prev.count == 0) {
      const XAppSpec* spec = ctx.catalog->xapp(f, chi);
      ctx.storage_lb -= spec->mem_req / ctx.catalog->budget.mem +
                        spec->disk_req / ctx.catalog->budget.disk;
    }
    ctx.group[{f, chi}] = prev;
  }
}

std::string encode_assignment(const Assignment& a) {
  std::ostringstream os;
  for (const auto& key : a.selected) os << key.str() << ';';
  os << '|';
  for (const auto& [key, inst] : a.uses) os << key.str() << '=' << inst.str() << ';';
  return os.str();
}

// Evaluates one complete discrete combination, enumerating the sharing
// partitions that can matter: full consolidation per (function, chi) always
// dominates except for the transition cap, where moving newly arrived
// services out of a continuing instance can relieve co-existence pressure.
void evaluate_leaf(SearchContext& ctx, double priority_sum) {
  const Catalog& catalog = *ctx.catalog;

  struct User {
    ConfigKey key;
    bool is_protected = false;
  };
  std::map<std::pair<std::string, int>, std::vector<User>> users;
  Assignment base;
  for (int s = 0; s < int(ctx.services.size()); ++s) {
    const ServiceOption& opt = ctx.options[s][ctx.choice[s]];
    if (!opt.cfg) continue;
    ConfigKey key{ctx.service_ids[s], opt.cfg->id};
    base.selected.insert(key);
    bool prot = ctx.state->protected_services.count(key.service) > 0;
    for (const auto& [f, chi] : opt.levels) users[{f, chi}].push_back({key, prot});
  }

  // Per-group split alternatives. Variant 0 merges everyone; when the group
  // mixes continuing and new services, subsets of the new services may be
  // carved out into a second replica.
  std::vector<std::pair<std::string, int>> group_keys;
  std::vector<std::vector<int>> split_masks;  // bitmask over the group's new users
  for (const auto& [fc, list] : users) {
    group_keys.push_back(fc);
    std::vector<int> masks = {0};
    bool has_protected = false;
    int new_count = 0;
    for (const auto& u : list) {
      if (u.is_protected)
        has_protected = true;
      else
        new_count++;
    }
    if (has_protected && new_count > 0 && !ctx.state->previous.uses.empty()) {
      for (int mask = 1; mask < (1 << new_count); ++mask) masks.push_back(mask);
    }
    split_masks.push_back(std::move(masks));
  }

  std::vector<int> pick(group_keys.size(), 0);
  while (true) {
    if (!count_node(ctx)) return;

    Assignment skeleton = base;
    for (std::size_t g = 0; g < group_keys.size(); ++g) {
      const auto& [f, chi] = group_keys[g];
      const auto& list = users.at(group_keys[g]);
      int mask = split_masks[g][pick[g]];
      int new_seen = 0;
      for (const auto& u : list) {
        int replica = 0;
        if (!u.is_protected) {
          if (mask & (1 << new_seen)) replica = 1;
          new_seen++;
        }
        skeleton.uses.insert({u.key, InstanceId{f, chi, replica}});
      }
    }
    skeleton = canonicalize_replicas(skeleton, *ctx.state, catalog);

    // storage, plain and transition
    std::set<InstanceId> insts;
    for (const auto& [key, inst] : skeleton.uses) insts.insert(inst);
    bool storage_ok = true;
    double mem = 0.0, disk = 0.0;
    for (const auto& inst : insts) {
      const XAppSpec* spec = catalog.xapp(inst.function_id, inst.chi);
      skeleton.rho[inst] = {0.0, spec->mem_req, spec->disk_req};
      mem += spec->mem_req;
      disk += spec->disk_req;
    }
    if (mem > catalog.budget.mem * (1.0 + kFeasTol) ||
        disk > catalog.budget.disk * (1.0 + kFeasTol))
      storage_ok = false;
    if (storage_ok) {
      auto [f1, f2] = transition_sets(*ctx.state, skeleton);
      for (int k = 1; k < kResourceCount && storage_ok; ++k) {
        double carried = 0.0;
        for (const auto& inst : f1)
          if (!f2.count(inst))
            if (auto it = ctx.state->previous.rho.find(inst); it != ctx.state->previous.rho.end())
              carried += it->second[k];
        double current = 0.0;
        for (const auto& inst : f2) current += skeleton.rho.at(inst)[k];
        if (carried + current > catalog.budget[k] * (1.0 + kFeasTol)) storage_ok = false;
      }
    }

    if (storage_ok) {
      auto cpu = min_cpu_allocation(skeleton, *ctx.state, catalog);
      if (cpu.feasible) {
        double cpu_total = 0.0;
        for (auto& [inst, value] : cpu.cpu) {
          skeleton.rho.at(inst).cpu = value;
          cpu_total += value;
        }
        if (cpu_total <= catalog.budget.cpu * (1.0 + kFeasTol)) {
          double psi = objective(skeleton, catalog);
          bool better = psi > ctx.incumbent + 1e-12;
          if (!better && ctx.have_best && std::abs(psi - ctx.incumbent) <= 1e-12) {
            std::string enc = encode_assignment(skeleton);
            if (enc < ctx.best_encoding) {
              ctx.best = skeleton;
              ctx.best_encoding = std::move(enc);
            }
          } else if (better) {
            ctx.incumbent = psi;
            ctx.best = skeleton;
            ctx.best_encoding = encode_assignment(skeleton);
            ctx.have_best = true;
          }
        }
      }
    }

    // next partition combination
    std::size_t g = 0;
    while (g < pick.size()) {
      if (++pick[g] < int(split_masks[g].size())) break;
      pick[g] = 0;
      ++g;
    }
    if (g == pick.size()) break;
  }
  (void)priority_sum;
}

void enumerate_levels(const Catalog& catalog, const ServiceSpec& svc, const ConfigGraph& cfg,
                      std::vector<ServiceOption>& out) {
  std::vector<std::string> nodes = cfg.nodes;
  std::sort(nodes.begin(), nodes.end());
  std::vector<std::vector<const XAppSpec*>> choices;
  for (const auto& n : nodes) {
    std::vector<const XAppSpec*> levels;
    for (const auto& x : catalog.functions.at(n).xapps) levels.push_back(&x);
    choices.push_back(std::move(levels));
  }
  std::vector<int> idx(nodes.size(), 0);
  while (true) {
    std::map<std::string, const XAppSpec*> chosen;
    for (std::size_t i = 0; i < nodes.size(); ++i) chosen[nodes[i]] = choices[i][idx[i]];
    if (config_quality(cfg, chosen).sink_quality + kFeasTol >= svc.target_quality) {
      ServiceOption opt;
      opt.cfg = &cfg;
      for (std::size_t i = 0; i < nodes.size(); ++i)
        opt.levels.push_back({nodes[i], choices[i][idx[i]]->chi});
      out.push_back(std::move(opt));
    }
    std::size_t i = 0;
    while (i < idx.size()) {
      if (++idx[i] < int(choices[i].size())) break;
      idx[i] = 0;
      ++i;
    }
    if (i == idx.size()) break;
  }
}

}  // namespace

OracleOutcome solve_exact(const Catalog& catalog, const DeploymentState& state,
                          const OracleLimits& limits) {
  OracleOutcome outcome;
  SearchContext ctx;
  ctx.catalog = &catalog;
  ctx.state = &state;
  ctx.limits = limits;
  ctx.deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(limits.time_budget));

  for (const auto& [sid, svc] : catalog.services) {
    ctx.service_ids.push_back(sid);
    ctx.services.push_back(&svc);
  }

  for (int s = 0; s < int(ctx.services.size()); ++s) {
    const ServiceSpec& svc = *ctx.services[s];
    std::vector<ServiceOption> opts;
    std::vector<const ConfigGraph*> cfgs;
    for (const auto& cfg : svc.configs) cfgs.push_back(&cfg);
    std::sort(cfgs.begin(), cfgs.end(),
              [](const ConfigGraph* a, const ConfigGraph* b) { return a->id < b->id; });
    for (const ConfigGraph* cfg : cfgs) enumerate_levels(catalog, svc, *cfg, opts);

    // cheap exclusive-deployment estimate for ordering: most promising first
    for (auto& opt : opts) {
      double t_node = node_latency_target(svc, *opt.cfg);
      double cost = 0.0;
      for (const auto& [f, chi] : opt.levels) {
        const XAppSpec* spec = catalog.xapp(f, chi);
        cost += required_cpu(spec->theta, svc.input_rate, t_node) / catalog.budget.cpu +
                spec->mem_req / catalog.budget.mem + spec->disk_req / catalog.budget.disk;
      }
      opt.order_score = svc.priority - cost / kResourceCount;
    }
    std::stable_sort(opts.begin(), opts.end(), [](const ServiceOption& a, const ServiceOption& b) {
      return a.order_score > b.order_score;
    });
    opts.push_back(ServiceOption{});  // "not deployed" explored last
    ctx.options.push_back(std::move(opts));
  }

  ctx.suffix_gain.assign(ctx.services.size() + 1, 0.0);
  for (int s = int(ctx.services.size()) - 1; s >= 0; --s) {
    // marginal-cost floor: even a fully shared deployment pays the stability
    // CPU of its own load at the cheapest complexity level
    double floor_cost = kInf;
    for (const auto& opt : ctx.options[s]) {
      if (!opt.cfg) continue;
      double cost = 0.0;
      for (const auto& [f, chi] : opt.levels) {
        double theta_max = 0.0;
        for (const auto& x : catalog.functions.at(f).xapps)
          theta_max = std::max(theta_max, x.theta);
        cost += ctx.services[s]->input_rate / theta_max / catalog.budget.cpu;
      }
      floor_cost = std::min(floor_cost, cost / kResourceCount);
    }
    double gain = 0.0;
    if (std::isfinite(floor_cost)) gain = std::max(0.0, ctx.services[s]->priority - floor_cost);
    ctx.suffix_gain[s] = ctx.suffix_gain[s + 1] + gain;
  }

  ctx.choice.assign(ctx.services.size(), 0);
  // DFS over per-service options; ctx.choice records the current path.
  struct Walker {
    SearchContext& ctx;
    void run(int depth, double priority_sum) {
      if (ctx.exceeded) return;
      if (depth == int(ctx.services.size())) {
        evaluate_leaf(ctx, priority_sum);
        return;
      }
      for (int oi = 0; oi < int(ctx.options[depth].size()); ++oi) {
        if (!count_node(ctx)) return;
        const ServiceOption& opt = ctx.options[depth][oi];
        ctx.choice[depth] = oi;
        double gain = opt.cfg ? ctx.services[depth]->priority : 0.0;
        push_option(ctx, depth, opt);

        double cpu_lb = cpu_lower_bound(ctx);
        double cost_lb = (ctx.storage_lb + cpu_lb / ctx.catalog->budget.cpu) / kResourceCount;
        double bound = priority_sum + gain + ctx.suffix_gain[depth + 1] - cost_lb;

        bool dead = cpu_lb > ctx.catalog->budget.cpu * (1.0 + kFeasTol);
        if (!dead) {
          double mem = 0.0, disk = 0.0;
          for (const auto& [fc, load] : ctx.group) {
            if (load.count <= 0) continue;
            const XAppSpec* spec = ctx.catalog->xapp(fc.first, fc.second);
            mem += spec->mem_req;
            disk += spec->disk_req;
          }
          if (mem > ctx.catalog->budget.mem * (1.0 + kFeasTol) ||
              disk > ctx.catalog->budget.disk * (1.0 + kFeasTol))
            dead = true;
        }

        if (!dead && bound >= ctx.incumbent - 1e-12) run(depth + 1, priority_sum + gain);
        pop_option(ctx, depth, opt);
        if (ctx.exceeded) return;
      }
    }
  } walker{ctx};
  walker.run(0, 0.0);

  outcome.nodes_used = ctx.nodes;
  if (ctx.exceeded) {
    outcome.exceeded = true;
    return outcome;
  }

  outcome.plan.assignment = ctx.have_best ? ctx.best : Assignment{};
  outcome.plan.objective = objective(outcome.plan.assignment, catalog);
  outcome.plan.upper_bound = outcome.plan.objective;
  outcome.plan.iterations = int(std::min<std::int64_t>(ctx.nodes, INT32_MAX));
  outcome.plan.stop_reason = StopReason::kGap;
  return outcome;
}

}  // namespace oreo
