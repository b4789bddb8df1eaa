#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mbpf/annealing.hpp"
#include "mbpf/baselines.hpp"
#include "mbpf/results.hpp"
#include "mbpf/scenarios.hpp"

namespace mbpf {

// Batch of independent runs: one scenario, one policy, `runs` seeds.
struct BatchConfig {
  std::string scenario = "line3-1ch";  // built-in name or file path
  std::string policy = "dp-exact";     // dp-exact | dp-approx | greedy | minint-wifi
  Scheme scheme = Scheme::ServerCentric;
  std::optional<std::uint64_t> iterations;  // default depends on the scenario
  std::size_t runs = 1;
  std::uint64_t seed = 1;
  double t0 = 1.0;
  std::string schedule = "invsqrtlog";
  std::uint64_t record_every = 1000;
  std::size_t threads = 0;  // 0: hardware concurrency
};

struct BatchRun {
  std::size_t run_id = 0;
  std::uint64_t seed = 0;
  Scenario scenario;
  RunResult result;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

struct BatchSummary {
  MetricSummary energy;  // over feasible runs
  MetricSummary weighted_throughput;
  std::size_t runs = 0;
  std::size_t infeasible_runs = 0;
};

inline bool is_grid_scenario(const std::string& name) { return name.starts_with("grid16"); }

inline std::uint64_t default_iterations(const std::string& scenario) {
  return is_grid_scenario(scenario) ? 200000 : 20000;
}

// Built-in name, else a scenario file.
inline Scenario resolve_scenario(const std::string& name_or_path, std::uint64_t seed) {
  if (auto s = builtin::by_name(name_or_path, seed)) return *s;
  if (!std::filesystem::exists(name_or_path))
    throw ScenarioError("unknown scenario '" + name_or_path + "' (not a built-in name or an existing file)");
  return load_scenario(name_or_path);
}

inline PolicyKind parse_policy_kind(const std::string& name) {
  if (name == "dp-exact") return PolicyKind::DpExact;
  if (name == "dp-approx") return PolicyKind::DpApprox;
  if (name == "greedy") return PolicyKind::Greedy;
  throw std::invalid_argument("unknown policy '" + name + "'");
}

inline Scheme parse_scheme(const std::string& name) {
  if (name == "server") return Scheme::ServerCentric;
  if (name == "client") return Scheme::ClientContention;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

// Seed of run k; grid scenarios also draw their clients from it.
inline std::uint64_t run_seed(std::uint64_t base, std::size_t k) { return base + k; }

inline BatchRun execute_run(const BatchConfig& cfg, std::size_t k) {
  BatchRun out;
  out.run_id = k;
  out.seed = run_seed(cfg.seed, k);
  out.scenario = resolve_scenario(cfg.scenario, out.seed);
  const Network net = to_network(out.scenario);
  const auto pinned = pinned_channels(out.scenario, net);
  if (cfg.policy == "minint-wifi") {
    if (cfg.scheme != Scheme::ServerCentric)
      throw std::invalid_argument("minint-wifi is defined for the server-centric scheme only");
    out.result = run_minint_wifi(net, out.seed, kDefaultMinIntRestarts, pinned);
    return out;
  }
  OptimizerPolicy policy;
  policy.kind = parse_policy_kind(cfg.policy);
  policy.scheme = cfg.scheme;
  policy.schedule = AnnealingSchedule::parse(cfg.schedule, cfg.t0);
  policy.iterations = cfg.iterations.value_or(default_iterations(cfg.scenario));
  policy.seed = out.seed;
  policy.record_every = cfg.record_every;
  out.result = run(net, policy, pinned);
  return out;
}

/// Runs every seed; results come back in run order whatever the thread count.
inline std::vector<BatchRun> run_batch(const BatchConfig& cfg) {
  if (cfg.runs == 0) throw std::invalid_argument("runs must be at least 1");
  if (cfg.policy != "minint-wifi") {
    (void)parse_policy_kind(cfg.policy);
    (void)AnnealingSchedule::parse(cfg.schedule, cfg.t0);
  }
  std::vector<BatchRun> out(cfg.runs);
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cfg.runs);
  if (threads <= 1) {
    for (std::size_t k = 0; k < cfg.runs; ++k) out[k] = execute_run(cfg, k);
    return out;
  }
  std::vector<std::exception_ptr> errors(cfg.runs);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < cfg.runs; k += threads) {
        try {
          out[k] = execute_run(cfg, k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline MetricSummary summarize(const std::vector<double>& xs) {
  MetricSummary m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

inline BatchSummary summarize(const std::vector<BatchRun>& runs) {
  std::vector<double> u, thr;
  BatchSummary s;
  s.runs = runs.size();
  for (const auto& r : runs) {
    thr.push_back(r.result.report.weighted_throughput);
    if (r.result.energy)
      u.push_back(r.result.energy.value());
    else
      ++s.infeasible_runs;
  }
  s.energy = summarize(u);
  s.weighted_throughput = summarize(thr);
  return s;
}

inline std::string trajectory_csv(const std::vector<BatchRun>& runs) {
  std::ostringstream os;
  os << kTrajectoryCsvHeader << '\n';
  for (const auto& r : runs) write_trajectory_csv(os, std::to_string(r.run_id), r.result);
  return os.str();
}

inline nlohmann::ordered_json batch_json(const BatchConfig& cfg, const std::vector<BatchRun>& runs) {
  const auto s = summarize(runs);
  nlohmann::ordered_json j;
  j["scenario"] = cfg.scenario;
  j["policy"] = cfg.policy;
  j["scheme"] = to_string(cfg.scheme);
  j["base_seed"] = cfg.seed;
  j["summary"] = {{"runs", s.runs},
                  {"infeasible_runs", s.infeasible_runs},
                  {"energy_mean", s.energy.mean},
                  {"energy_stddev", s.energy.stddev},
                  {"weighted_throughput_mean", s.weighted_throughput.mean},
                  {"weighted_throughput_stddev", s.weighted_throughput.stddev}};
  auto& arr = j["runs"] = nlohmann::ordered_json::array();
  for (const auto& r : runs) {
    const Network net = to_network(r.scenario);
    auto rj = result_json(net, r.result);
    nlohmann::ordered_json entry;
    entry["run_id"] = r.run_id;
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(scenario_hash(r.scenario)));
    entry["scenario_hash"] = hash;
    entry.update(rj);
    arr.push_back(std::move(entry));
  }
  return j;
}

}  // namespace mbpf
