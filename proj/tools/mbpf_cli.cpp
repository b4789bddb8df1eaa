// mbpf: batch runner for the multi-band proportional-fairness optimizer.
//
//   mbpf run --scenario line3-1ch --policy dp-exact --runs 20 --seed 7
//   mbpf compare --scenario grid16-weighted --runs 20
//   mbpf enumerate --scenario micro --json
//   mbpf export --scenario grid16-unweighted --seed 3 --out grid.scn

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mbpf/mbpf.hpp"

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

std::string describe(const mbpf::Network& net, const mbpf::Configuration& cfg) {
  std::string s = "channels:";
  for (std::size_t n = 0; n < net.num_vaps(); ++n)
    s += " " + net.vaps()[n].id + "=" + net.channels()[cfg.channel[n]].id;
  s += "\nassociation:";
  for (std::size_t i = 0; i < net.num_clients(); ++i)
    s += " " + net.clients()[i].id + "->" + net.vaps()[cfg.association[i]].id;
  return s;
}

void print_metric_line(const char* label, const mbpf::BatchSummary& s) {
  std::printf("%-12s  sum w log r = %12.6f +- %-10.6f  sum w r = %10.6f +- %-10.6f  (%zu runs",
              label, s.energy.mean, s.energy.stddev, s.weighted_throughput.mean, s.weighted_throughput.stddev, s.runs);
  if (s.infeasible_runs) std::printf(", %zu infeasible", s.infeasible_runs);
  std::printf(")\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint channel selection, association, access and scheduling for weighted proportional fairness"};
  app.require_subcommand(1);

  mbpf::BatchConfig batch;
  std::string scheme = "server";
  std::uint64_t iters = 0;
  std::string out_dir = ".";

  auto* run = app.add_subcommand("run", "Run one policy over several seeds and write CSV / JSON results");
  run->add_option("--scenario", batch.scenario, "Built-in name or scenario file")->capture_default_str();
  run->add_option("--policy", batch.policy, "dp-exact | dp-approx | greedy | minint-wifi")
      ->check(CLI::IsMember({"dp-exact", "dp-approx", "greedy", "minint-wifi"}))
      ->capture_default_str();
  run->add_option("--scheme", scheme, "server | client")->check(CLI::IsMember({"server", "client"}))->capture_default_str();
  auto* iters_opt = run->add_option("--iters", iters, "Iterations per run (default 20000, 200000 for grid16)");
  run->add_option("--runs", batch.runs, "Number of seeds")->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--seed", batch.seed, "Base seed; run k uses seed + k")->capture_default_str();
  run->add_option("--t0", batch.t0, "Initial temperature")->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--schedule", batch.schedule, "invsqrtlog | invlog | geometric:<ratio> | const:<T>")
      ->capture_default_str();
  run->add_option("--record-every", batch.record_every, "Trajectory cadence in iterations")->capture_default_str();
  run->add_option("--threads", batch.threads, "Worker threads (0: all cores)")->capture_default_str();
  run->add_option("--out-dir", out_dir, "Directory for trajectory.csv and summary.json")->capture_default_str();

  std::string cmp_scenario = "line3-2ch";
  std::size_t cmp_runs = 20;
  std::uint64_t cmp_seed = 1;
  std::uint64_t cmp_iters = 0;
  std::string cmp_out;
  auto* compare = app.add_subcommand("compare", "DP, Greedy and MinInt-Wifi side by side on one scenario");
  compare->add_option("--scenario", cmp_scenario, "Built-in name or scenario file")->capture_default_str();
  compare->add_option("--runs", cmp_runs, "Number of seeds")->check(CLI::PositiveNumber)->capture_default_str();
  compare->add_option("--seed", cmp_seed, "Base seed")->capture_default_str();
  auto* cmp_iters_opt = compare->add_option("--iters", cmp_iters, "Iterations per run");
  compare->add_option("--t0", batch.t0, "Initial temperature")->check(CLI::PositiveNumber)->capture_default_str();
  compare->add_option("--schedule", batch.schedule, "Temperature schedule")->capture_default_str();
  compare->add_option("--out", cmp_out, "Optional CSV table path");

  std::string enum_scenario = "micro";
  double guard = mbpf::oracle::kDefaultGuard;
  bool as_json = false;
  std::uint64_t enum_seed = 1;
  auto* enumerate = app.add_subcommand("enumerate", "Exhaustive optimum of a micro scenario (test oracle)");
  enumerate->add_option("--scenario", enum_scenario, "Built-in name or scenario file")->capture_default_str();
  enumerate->add_option("--scheme", scheme, "server | client")->check(CLI::IsMember({"server", "client"}))->capture_default_str();
  enumerate->add_option("--seed", enum_seed, "Seed for generated scenarios")->capture_default_str();
  enumerate->add_option("--guard", guard, "Maximum configurations to visit")->capture_default_str();
  enumerate->add_flag("--json", as_json, "Machine-readable output");

  std::string export_scenario;
  std::string export_path;
  std::uint64_t export_seed = 1;
  auto* exp = app.add_subcommand("export", "Write a built-in scenario in the scenario file format");
  exp->add_option("--scenario", export_scenario, "Built-in name")->required();
  exp->add_option("--seed", export_seed, "Seed for generated clients")->capture_default_str();
  exp->add_option("--out", export_path, "Output path (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      batch.scheme = mbpf::parse_scheme(scheme);
      if (iters_opt->count()) batch.iterations = iters;
      const auto runs = mbpf::run_batch(batch);
      std::filesystem::create_directories(out_dir);
      write_file(std::filesystem::path(out_dir) / "trajectory.csv", mbpf::trajectory_csv(runs));
      write_file(std::filesystem::path(out_dir) / "summary.json", mbpf::batch_json(batch, runs).dump(2) + "\n");
      std::printf("%s on %s (%s scheme)\n", batch.policy.c_str(), batch.scenario.c_str(), scheme.c_str());
      print_metric_line(batch.policy.c_str(), mbpf::summarize(runs));
      return 0;
    }

    if (compare->parsed()) {
      std::string table = "policy,energy_mean,energy_stddev,weighted_throughput_mean,weighted_throughput_stddev\n";
      std::printf("%s, %zu runs\n", cmp_scenario.c_str(), cmp_runs);
      for (const char* policy : {"dp-exact", "greedy", "minint-wifi"}) {
        mbpf::BatchConfig c = batch;
        c.scenario = cmp_scenario;
        c.policy = policy;
        c.runs = cmp_runs;
        c.seed = cmp_seed;
        if (cmp_iters_opt->count()) c.iterations = cmp_iters;
        const auto s = mbpf::summarize(mbpf::run_batch(c));
        print_metric_line(policy, s);
        table += std::string(policy) + "," + mbpf::format_metric(s.energy.mean) + "," +
                 mbpf::format_metric(s.energy.stddev) + "," + mbpf::format_metric(s.weighted_throughput.mean) + "," +
                 mbpf::format_metric(s.weighted_throughput.stddev) + "\n";
      }
      std::printf("%-12s  unavailable (not implemented)\n", "minint-pf");
      table += "minint-pf,unavailable,unavailable,unavailable,unavailable\n";
      if (!cmp_out.empty()) write_file(cmp_out, table);
      return 0;
    }

    if (enumerate->parsed()) {
      const auto sc = mbpf::resolve_scenario(enum_scenario, enum_seed);
      const mbpf::Network net = mbpf::to_network(sc);
      const auto opt = mbpf::oracle::enumerate_optimum(net, mbpf::parse_scheme(scheme), guard);
      if (as_json) {
        nlohmann::ordered_json j;
        j["scenario"] = enum_scenario;
        j["scheme"] = scheme;
        j["evaluated"] = opt.evaluated;
        j["energy"] = mbpf::energy_json(opt.energy);
        if (opt.energy) {
          for (std::size_t n = 0; n < net.num_vaps(); ++n)
            j["channels"][net.vaps()[n].id] = net.channels()[opt.config.channel[n]].id;
          for (std::size_t i = 0; i < net.num_clients(); ++i)
            j["association"][net.clients()[i].id] = net.vaps()[opt.config.association[i]].id;
        }
        std::cout << j.dump(2) << '\n';
      } else if (!opt.energy) {
        std::printf("no feasible configuration (%llu evaluated)\n", static_cast<unsigned long long>(opt.evaluated));
      } else {
        std::printf("U* = %.12g over %llu configurations\n%s\n", opt.energy.value(),
                    static_cast<unsigned long long>(opt.evaluated), describe(net, opt.config).c_str());
      }
      return 0;
    }

    if (exp->parsed()) {
      const auto sc = mbpf::builtin::by_name(export_scenario, export_seed);
      if (!sc) throw mbpf::ScenarioError("unknown built-in scenario '" + export_scenario + "'");
      if (export_path.empty())
        std::cout << mbpf::scenario_to_text(*sc);
      else
        mbpf::save_scenario(export_path, *sc);
      return 0;
    }
  } catch (const mbpf::oracle::SizeGuardError& e) {
    std::fprintf(stderr, "mbpf: refused: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mbpf: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
