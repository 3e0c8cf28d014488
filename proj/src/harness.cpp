#include "oreo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace oreo {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

constexpr double kZ90 = 1.6448536269514722;  // standard normal 95th percentile

}  // namespace

Catalog restrict_catalog(const Catalog& catalog, const std::vector<std::string>& service_ids) {
  Catalog view;
  view.functions = catalog.functions;
  view.budget = catalog.budget;
  view.meta = catalog.meta;
  for (const auto& sid : service_ids) {
    auto it = catalog.services.find(sid);
    if (it == catalog.services.end())
      throw std::invalid_argument("unknown service '" + sid + "' in epoch schedule");
    view.services[sid] = it->second;
  }
  return view;
}

RunReport report_from_assignment(const Catalog& view, const Assignment& assignment) {
  RunReport r;
  r.active_services = int(view.services.size());
  r.deployed_services = int(assignment.selected.size());
  r.deployed_fraction =
      r.active_services ? double(r.deployed_services) / r.active_services : 0.0;

  for (const auto& key : assignment.selected) {
    auto it = view.services.find(key.service);
    if (it != view.services.end()) r.priority_sum += it->second.priority;
  }
  std::set<InstanceId> instances;
  for (const auto& [key, inst] : assignment.uses) instances.insert(inst);
  r.xapp_count = int(instances.size());

  ResourceVector total;
  for (const auto& [inst, rho] : assignment.rho) total += rho;
  r.cpu_util = total.cpu / view.budget.cpu;
  r.mem_util = total.mem / view.budget.mem;
  r.disk_util = total.disk / view.budget.disk;

  r.objective = objective(assignment, view);

  double lat_sum = 0.0, q_sum = 0.0;
  int n = 0;
  for (const auto& key : assignment.selected) {
    auto it = view.services.find(key.service);
    if (it == view.services.end()) continue;
    auto perf = evaluate_config(key, assignment, view, 1e18);
    if (!perf) continue;
    lat_sum += perf->latency / it->second.target_latency;
    q_sum += perf->quality / it->second.target_quality;
    n++;
  }
  if (n > 0) {
    r.mean_norm_latency = lat_sum / n;
    r.mean_norm_quality = q_sum / n;
    r.has_norms = true;
  }
  return r;
}

std::vector<RunReport> run_experiment(const RunParams& params,
                                      std::vector<EpochOutcome>* details) {
  std::vector<RunReport> reports;

  for (int run = 0; run < params.runs; ++run) {
    std::uint64_t seed = params.seed + std::uint64_t(run);
    Catalog catalog = generate_scenario(ScenarioParams::for_scale(params.scale, seed));
    EpochSequence schedule = make_epoch_sequence(catalog, params.epochs, params.lifetime, seed);

    std::map<std::string, DeploymentState> lineage;
    for (const auto& policy : params.policies) lineage[policy];

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
      auto active = schedule.active(epoch);
      Catalog view = restrict_catalog(catalog, active);

      for (const auto& policy : params.policies) {
        DeploymentState& state = lineage[policy];
        state.protected_services.clear();
        for (const auto& key : state.previous.selected)
          if (view.services.count(key.service)) state.protected_services.insert(key.service);

        RunReport report;
        Assignment committed;
        bool exceeded = false;
        auto t0 = std::chrono::steady_clock::now();

        if (policy == "oreo") {
          EngineParams engine = params.engine;
          engine.seed = seed;
          auto plan = solve(view, state, engine);
          committed = plan.assignment;
          report = report_from_assignment(view, committed);
          report.upper_bound = plan.upper_bound;
          report.has_upper_bound = true;
          report.stop_reason = to_string(plan.stop_reason);
        } else if (policy == "exact") {
          auto outcome = solve_exact(view, state, params.oracle);
          if (outcome.exceeded) {
            exceeded = true;
            report.stop_reason = "EXCEEDED";
          } else {
            committed = outcome.plan.assignment;
            report = report_from_assignment(view, committed);
            report.upper_bound = outcome.plan.objective;
            report.has_upper_bound = true;
            report.stop_reason = "OPTIMAL";
          }
        } else if (policy == "baseline") {
          auto plan = solve_baseline(view, state);
          committed = plan.assignment;
          report = report_from_assignment(view, committed);
          report.stop_reason = "COMPLETE";
        } else {
          throw std::invalid_argument("unknown policy '" + policy + "'");
        }

        if (params.measure_time) {
          auto t1 = std::chrono::steady_clock::now();
          report.wall_time_ms =
              std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0)
                  .count();
        }
        report.scenario = params.scale;
        report.policy = policy;
        report.seed = seed;
        report.epoch = epoch;
        report.exceeded = exceeded;
        reports.push_back(report);

        if (details)
          details->push_back({policy, seed, epoch, view, state, committed, exceeded});

        // an exceeded oracle epoch leaves nothing deployed
        state.previous = committed;
      }
    }
  }
  return reports;
}

std::string reports_to_csv(const std::vector<RunReport>& reports) {
  std::ostringstream os;
  os << "scenario,policy,seed,epoch,deployed_fraction,priority_sum,xapp_count,cpu_util,"
        "mem_util,disk_util,objective,upper_bound,mean_norm_latency,mean_norm_quality,"
        "wall_time_ms,stop_reason\n";
  for (const auto& r : reports) {
    os << r.scenario << ',' << r.policy << ',' << r.seed << ',' << r.epoch << ',';
    if (r.exceeded) {
      os << ",,,,,,,,,,";
    } else {
      os << fmt(r.deployed_fraction) << ',' << fmt(r.priority_sum) << ',' << r.xapp_count << ','
         << fmt(r.cpu_util) << ',' << fmt(r.mem_util) << ',' << fmt(r.disk_util) << ','
         << fmt(r.objective) << ',' << (r.has_upper_bound ? fmt(r.upper_bound) : "") << ','
         << (r.has_norms ? fmt(r.mean_norm_latency) : "") << ','
         << (r.has_norms ? fmt(r.mean_norm_quality) : "") << ',';
    }
    os << fmt(r.wall_time_ms) << ',' << r.stop_reason << '\n';
  }
  return os.str();
}

std::vector<RunReport> reports_from_csv(const std::string& csv) {
  std::vector<RunReport> out;
  std::istringstream is(csv);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    cells.resize(16);
    RunReport r;
    r.scenario = cells[0];
    r.policy = cells[1];
    r.seed = std::stoull(cells[2]);
    r.epoch = std::stoi(cells[3]);
    r.exceeded = cells[4].empty();
    if (!r.exceeded) {
      r.deployed_fraction = std::stod(cells[4]);
      r.priority_sum = std::stod(cells[5]);
      r.xapp_count = std::stoi(cells[6]);
      r.cpu_util = std::stod(cells[7]);
      r.mem_util = std::stod(cells[8]);
      r.disk_util = std::stod(cells[9]);
      r.objective = std::stod(cells[10]);
      if (!cells[11].empty()) {
        r.upper_bound = std::stod(cells[11]);
        r.has_upper_bound = true;
      }
      if (!cells[12].empty()) {
        r.mean_norm_latency = std::stod(cells[12]);
        r.mean_norm_quality = std::stod(cells[13]);
        r.has_norms = true;
      }
    }
    if (!cells[14].empty()) r.wall_time_ms = std::stod(cells[14]);
    r.stop_reason = cells[15];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<RunReport>& reports) {
  struct Samples {
    std::map<std::string, std::vector<double>> metric_values;
  };
  std::map<std::pair<std::string, std::string>, Samples> cells;

  for (const auto& r : reports) {
    if (r.exceeded) continue;
    auto& s = cells[{r.scenario, r.policy}];
    s.metric_values["deployed_fraction"].push_back(r.deployed_fraction);
    s.metric_values["priority_sum"].push_back(r.priority_sum);
    s.metric_values["xapp_count"].push_back(r.xapp_count);
    s.metric_values["cpu_util"].push_back(r.cpu_util);
    s.metric_values["mem_util"].push_back(r.mem_util);
    s.metric_values["disk_util"].push_back(r.disk_util);
    s.metric_values["objective"].push_back(r.objective);
    if (r.has_norms) {
      s.metric_values["mean_norm_latency"].push_back(r.mean_norm_latency);
      s.metric_values["mean_norm_quality"].push_back(r.mean_norm_quality);
    }
    s.metric_values["wall_time_ms"].push_back(r.wall_time_ms);
  }

  // approximation ratio vs. the exact policy, paired per (scenario, seed, epoch)
  std::map<std::tuple<std::string, std::uint64_t, int>, double> exact_objective;
  for (const auto& r : reports)
    if (r.policy == "exact" && !r.exceeded)
      exact_objective[{r.scenario, r.seed, r.epoch}] = r.objective;
  for (const auto& r : reports) {
    if (r.policy == "exact" || r.exceeded) continue;
    auto it = exact_objective.find({r.scenario, r.seed, r.epoch});
    if (it == exact_objective.end() || it->second <= 1e-9) continue;
    cells[{r.scenario, r.policy}].metric_values["approx_ratio"].push_back(r.objective /
                                                                          it->second);
  }

  std::vector<SummaryRow> rows;
  for (const auto& [key, samples] : cells) {
    for (const auto& [metric, values] : samples.metric_values) {
      SummaryRow row;
      row.scenario = key.first;
      row.policy = key.second;
      row.metric = metric;
      row.n = int(values.size());
      double sum = 0.0;
      for (double v : values) sum += v;
      row.mean = values.empty() ? 0.0 : sum / values.size();
      double var = 0.0;
      if (values.size() > 1) {
        for (double v : values) var += (v - row.mean) * (v - row.mean);
        var /= (values.size() - 1);
      }
      double half = values.size() > 1 ? kZ90 * std::sqrt(var / values.size()) : 0.0;
      row.ci90_lo = row.mean - half;
      row.ci90_hi = row.mean + half;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "scenario,policy,metric,n,mean,ci90_lo,ci90_hi\n";
  for (const auto& row : rows)
    os << row.scenario << ',' << row.policy << ',' << row.metric << ',' << row.n << ','
       << fmt(row.mean) << ',' << fmt(row.ci90_lo) << ',' << fmt(row.ci90_hi) << '\n';
  return os.str();
}

}  // namespace oreo
