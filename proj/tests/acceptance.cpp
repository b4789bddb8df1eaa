// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "test_support.hpp"

using namespace mbpf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void note(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += (ok ? "" : "FAILED ") + what;
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------------------

Outcome radio_numerics() {
  Outcome o;
  const RadioModel radio;
  const auto p = channel_profile(Channel{"4g", 4000.0, 44.0}, radio);
  const double ranges[] = {37.34, 59.75, 89.62, 112.03};
  const double rates[] = {22, 11, 4, 2};
  double worst_range = 0.0, worst_rate = 0.0;
  for (int k = 0; k < 4; ++k) {
    worst_range = std::max(worst_range, std::abs(p.tiers[k].range_m - ranges[k]));
    worst_rate = std::max(worst_rate, std::abs(p.tiers[k].rate_mbps - rates[k]));
  }
  note(o, p.tiers.size() == 4 && worst_range <= 0.01, fmt("4 GHz tier ranges max error %.4f m", worst_range));
  note(o, worst_rate <= 0.01, fmt("rates max error %.4f Mbps", worst_rate));
  note(o, std::abs(p.interference_range_m - 275.59) <= 0.01,
       fmt("4 GHz interference range %.4f m", p.interference_range_m));
  const double base = channel_profile(builtin::ieee80211b(), radio).interference_range_m;
  note(o, std::abs(base - 369.0) <= 0.5, fmt("802.11b interference range %.2f m", base));
  return o;
}

Outcome schedule_and_access_optimality() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(2001);
  support::InstanceShape shape;
  shape.min_aps = 1;
  shape.max_aps = 3;
  shape.min_clients = 2;
  shape.max_clients = 5;
  shape.side = 220;
  double worst_gap = -1e300;
  int grid_failures = 0, perturb_failures = 0, perturbations = 0;
  const double eps = 1e-4;
  for (int rep = 0; rep < 200; ++rep) {
    const Network net = to_network(support::random_scenario(rng, shape));
    const Configuration cfg = support::random_configuration(net, rng);
    const double closed = optimal_throughput(net, cfg, Scheme::ServerCentric).energy.value();
    const auto num = oracle::numeric_phi_p_optimum(net, cfg);
    worst_gap = std::max(worst_gap, num.energy.value() - closed);
    if (closed < num.energy.value() - 1e-3) ++grid_failures;

    const Allocation best = optimal_allocation(net, cfg, Scheme::ServerCentric);
    auto check = [&](const Allocation& a) {
      ++perturbations;
      if (throughput(net, cfg, a).energy.value() > closed + 1e-12) ++perturb_failures;
    };
    for (std::size_t i = 0; i < net.num_clients(); ++i)
      for (std::size_t j = 0; j < net.num_clients(); ++j) {
        if (i == j || cfg.association[i] != cfg.association[j]) continue;
        Allocation a = best;
        a.schedule[i] += eps;
        a.schedule[j] -= eps;
        check(a);
      }
    for (std::size_t n = 0; n < net.num_vaps(); ++n)
      for (double d : {-eps, eps}) {
        Allocation a = best;
        const double v = a.access[n] + d;
        if (v < 0.0 || v > 1.0) continue;
        a.access[n] = v;
        check(a);
      }
  }
  const double secs = seconds_since(t0);
  note(o, grid_failures == 0, fmt("200 instances, search minus closed form at most %.2e", worst_gap));
  note(o, perturb_failures == 0, fmt("%d/%d perturbations improved", perturb_failures, perturbations));
  note(o, secs < 60.0, fmt("%.1f s", secs));
  return o;
}

Outcome energy_identity() {
  Outcome o;
  Rng rng(3001);
  support::InstanceShape shape;
  shape.max_aps = 6;
  shape.max_radios = 2;
  shape.max_clients = 14;
  shape.side = 300;
  for (Scheme scheme : {Scheme::ServerCentric, Scheme::ClientContention}) {
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
      const Network net = to_network(support::random_scenario(rng, shape));
      const Configuration cfg = support::random_configuration(net, rng);
      const double closed = energy(net, cfg, scheme).value();
      const double direct = oracle::direct_energy(net, cfg, scheme).value();
      worst = std::max(worst, std::abs(closed - direct) / std::max(std::abs(direct), 1e-300));
    }
    note(o, worst < 1e-12, fmt("%s: 1000 configurations, max relative error %.2e", to_string(scheme), worst));
  }
  return o;
}

Outcome delta_u_correctness() {
  Outcome o;
  Rng rng(4001);
  support::InstanceShape shape;
  shape.max_aps = 6;
  shape.max_radios = 2;
  shape.max_clients = 14;
  shape.side = 300;
  for (Scheme scheme : {Scheme::ServerCentric, Scheme::ClientContention}) {
    double worst = 0.0;
    int moves = 0, assoc = 0;
    while (moves < 1000) {
      const Network net = to_network(support::random_scenario(rng, shape));
      AnnealingState st(net, support::random_configuration(net, rng), scheme);
      const double before = energy(net, st.config(), scheme).value();
      Configuration after = st.config();
      Energy d;
      if (rng.bernoulli(0.5)) {
        const ClientIndex i = rng.index(net.num_clients());
        const auto options = feasible_aps(net, st.config().channel, i);
        const ApIndex n = options[rng.index(options.size())];
        after.association[i] = n;
        d = st.delta_association(i, n);
        ++assoc;
      } else {
        const ApIndex n = rng.index(net.num_vaps());
        const ChannelIndex c = rng.index(net.num_channels());
        after.channel[n] = c;
        d = st.delta_channel(n, c);
      }
      const Energy ref = energy(net, after, scheme);
      if (bool(ref) != bool(d)) {
        worst = std::numeric_limits<double>::infinity();
      } else if (ref) {
        worst = std::max(worst, std::abs(d.value() - (ref.value() - before)));
      }
      ++moves;
    }
    note(o, worst <= 1e-9,
         fmt("%s exact: %d moves (%d association), max error %.2e", to_string(scheme), moves, assoc, worst));
  }

  // Approximate association scores: dense single-radio deployments where every
  // neighborhood load is at least 100 times the moving client's weight.
  for (Scheme scheme : {Scheme::ServerCentric, Scheme::ClientContention}) {
    double worst = 0.0;
    int moves = 0;
    Rng gen(4100 + static_cast<int>(scheme));
    while (moves < 1000) {
      support::InstanceShape dense;
      dense.min_aps = 2;
      dense.max_aps = 5;
      dense.min_clients = 300;
      dense.max_clients = 500;
      dense.side = 250;
      const Network net = to_network(support::random_scenario(gen, dense));
      AnnealingState st(net, support::random_configuration(net, gen), scheme);
      for (int k = 0; k < 50; ++k) {
        const ClientIndex i = gen.index(net.num_clients());
        const double wi = net.weight(i);
        bool dense_enough = true;
        for (ApIndex n : feasible_aps(net, st.config().channel, i))
          st.for_each_same_channel(n, [&](ApIndex m) {
            if (neighborhood_load_without_client(net, st.config(), st.aggregates(), m, i) < 100.0 * wi)
              dense_enough = false;
          });
        if (!dense_enough) continue;
        auto exact = propose(st, {MoveProposal::Mover::Client, i}, true);
        auto approx = propose(st, {MoveProposal::Mover::Client, i}, false);
        assign_probabilities(exact.candidates, exact.current, 1.0);
        assign_probabilities(approx.candidates, approx.current, 1.0);
        for (std::size_t c = 0; c < exact.candidates.size(); ++c)
          worst = std::max(worst, std::abs(exact.candidates[c].probability - approx.candidates[c].probability));
        ++moves;
      }
    }
    note(o, worst <= 0.02, fmt("%s approximate: %d moves at T = 1, max probability gap %.2e", to_string(scheme), moves,
                               worst));
  }
  return o;
}

Outcome monte_carlo_agreement() {
  Outcome o;
  Rng rng(5001);
  support::InstanceShape shape;
  shape.max_aps = 4;
  shape.max_clients = 6;
  shape.side = 250;
  double worst_z = 0.0;
  int checked = 0;
  const std::uint64_t slots = 1000000;
  for (int inst = 0; inst < 20; ++inst) {
    const Scheme scheme = inst % 2 == 0 ? Scheme::ServerCentric : Scheme::ClientContention;
    const Network net = to_network(support::random_scenario(rng, shape));
    const Configuration cfg = support::random_configuration(net, rng);
    const Allocation alloc = optimal_allocation(net, cfg, scheme);
    const auto analytic = throughput(net, cfg, alloc).rates;
    const auto mc = slot_monte_carlo(net, cfg, alloc, slots, 5100 + inst);
    for (std::size_t i = 0; i < net.num_clients(); ++i) {
      const double b = net.rate(cfg, i), q = analytic[i] / b;
      const double sigma = b * std::sqrt(q * (1.0 - q) / static_cast<double>(slots));
      const double z = sigma > 0.0 ? std::abs(mc[i] - analytic[i]) / sigma : (mc[i] == analytic[i] ? 0.0 : 1e300);
      worst_z = std::max(worst_z, z);
      ++checked;
    }
  }
  note(o, worst_z <= 3.0, fmt("20 instances, %d client rates at 1e6 slots, max |error| = %.2f sigma", checked, worst_z));
  return o;
}

Outcome micro_convergence() {
  Outcome o;
  const auto t0 = Clock::now();
  const Network net = to_network(builtin::micro());
  const auto opt = oracle::enumerate_optimum(net, Scheme::ServerCentric);
  int dp_hits = 0, greedy_local = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    OptimizerPolicy dp;
    dp.iterations = 5000;
    dp.seed = seed;
    const auto r = run(net, dp);
    if (r.energy && std::abs(r.energy.value() - opt.energy.value()) <= 1e-9) ++dp_hits;

    OptimizerPolicy greedy = dp;
    greedy.kind = PolicyKind::Greedy;
    const auto g = run(net, greedy);
    if (is_local_maximum(AnnealingState(net, g.final_config, Scheme::ServerCentric))) ++greedy_local;
  }
  const double secs = seconds_since(t0);
  note(o, dp_hits >= 95, fmt("DP-exact hit U* = %.6f in %d/100 seeds", opt.energy.value(), dp_hits));
  note(o, greedy_local == 100, fmt("Greedy at a local optimum in %d/100", greedy_local));
  note(o, secs < 120.0, fmt("%.1f s", secs));
  return o;
}

Outcome gibbs_measure() {
  Outcome o;
  const Network net = to_network(builtin::micro());
  const double T = 1.0;
  const auto all = oracle::enumerate_all(net, Scheme::ServerCentric);
  std::map<std::uint64_t, std::size_t> index;
  std::vector<double> weight;
  double umax = -1e300;
  for (const auto& e : all) umax = std::max(umax, e.energy.value());
  double zsum = 0.0;
  for (const auto& e : all) {
    index[config_hash(e.config)] = weight.size();
    weight.push_back(std::exp((e.energy.value() - umax) / T));
    zsum += weight.back();
  }

  // 2e6 steps thinned by 20: 1e5 nearly independent draws.
  const std::uint64_t steps = 2000000, thin = 20;
  OptimizerPolicy policy;
  policy.order = SelectionOrder::UniformRandom;
  policy.schedule = AnnealingSchedule::parse("const:1");
  Rng rng(7001);
  Rng init = rng.split(0);
  AnnealingState st(net, initial_configuration(net, init), Scheme::ServerCentric);
  Rng moves = rng.split(1);
  for (std::uint64_t t = 1; t <= 10000; ++t) gibbs_step(st, t, policy, moves);  // burn-in
  std::vector<double> counts(weight.size(), 0.0);
  double samples = 0.0;
  for (std::uint64_t t = 1; t <= steps; ++t) {
    gibbs_step(st, t, policy, moves);
    if (t % thin == 0) {
      counts[index.at(config_hash(st.config()))] += 1.0;
      samples += 1.0;
    }
  }

  // Bins with expected count below 5 are pooled.
  double chi2 = 0.0, pooled_obs = 0.0, pooled_exp = 0.0;
  int bins = 0;
  for (std::size_t k = 0; k < weight.size(); ++k) {
    const double expected = samples * weight[k] / zsum;
    if (expected < 5.0) {
      pooled_obs += counts[k];
      pooled_exp += expected;
      continue;
    }
    chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
    ++bins;
  }
  if (pooled_exp > 0.0) {
    chi2 += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++bins;
  }
  const boost::math::chi_squared dist(bins - 1);
  const double p = boost::math::cdf(boost::math::complement(dist, chi2));
  note(o, p > 0.01, fmt("%zu configurations in %d bins, %.0f draws, chi2 = %.2f, p = %.3f", weight.size(), bins, samples,
                        chi2, p));
  return o;
}

struct PolicyStats {
  BatchSummary summary;
  std::vector<BatchRun> runs;
};

PolicyStats batch(const std::string& scenario, const std::string& policy, std::size_t runs, std::uint64_t seed) {
  BatchConfig cfg;
  cfg.scenario = scenario;
  cfg.policy = policy;
  cfg.runs = runs;
  cfg.seed = seed;
  PolicyStats s;
  s.runs = run_batch(cfg);
  s.summary = summarize(s.runs);
  return s;
}

std::string metrics(const char* name, const BatchSummary& s) {
  return fmt("%s U %.3f, thr %.2f", name, s.energy.mean, s.weighted_throughput.mean);
}

Outcome line_one_channel() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto dp = batch("line3-1ch", "dp-exact", 20, 1);
  const auto greedy = batch("line3-1ch", "greedy", 20, 1);
  const auto minint = batch("line3-1ch", "minint-wifi", 20, 1);
  auto all_middle = [](const PolicyStats& s) {
    int n = 0;
    for (const auto& r : s.runs)
      n += std::all_of(r.result.final_config.association.begin(), r.result.final_config.association.end(),
                       [](ApIndex a) { return a == 1; });
    return n;
  };
  const int dp_mid = all_middle(dp), greedy_mid = all_middle(greedy);
  note(o, dp_mid == 20 && greedy_mid == 20, fmt("all clients on ap1: DP %d/20, Greedy %d/20", dp_mid, greedy_mid));
  const auto &d = dp.summary, &g = greedy.summary, &m = minint.summary;
  const double tol = 1e-9;
  const bool ordered = d.energy.mean >= g.energy.mean - tol && g.energy.mean >= m.energy.mean - tol &&
                       d.weighted_throughput.mean >= g.weighted_throughput.mean - tol &&
                       g.weighted_throughput.mean >= m.weighted_throughput.mean - tol;
  note(o, ordered, metrics("DP", d) + " >= " + metrics("Greedy", g) + " >= " + metrics("MinInt-Wifi", m));
  const double secs = seconds_since(t0);
  note(o, secs < 60.0, fmt("%.1f s", secs));
  return o;
}

Outcome line_two_channels() {
  Outcome o;
  const auto dp = batch("line3-2ch", "dp-exact", 20, 1);
  const auto minint = batch("line3-2ch", "minint-wifi", 20, 1);
  const std::vector<ChannelIndex> zero_interference{1, 0, 1};
  int minint_ok = 0;
  for (const auto& r : minint.runs) minint_ok += r.result.final_config.channel == zero_interference;
  note(o, minint_ok == 20, fmt("MinInt-Wifi outer APs on 16 GHz, middle on 802.11b in %d/20", minint_ok));

  int middle16 = 0, beats = 0;
  const BatchRun* best = &dp.runs.front();
  for (const auto& r : dp.runs) {
    middle16 += r.result.final_config.channel[1] == 1;
    if (r.result.energy.value() > best->result.energy.value()) best = &r;
    bool b = true;
    for (const auto& m : minint.runs)
      b = b && r.result.energy.value() > m.result.energy.value() &&
          r.result.report.weighted_throughput > m.result.report.weighted_throughput;
    beats += b;
  }
  note(o, 2 * middle16 > 20 && best->result.final_config.channel[1] == 1,
       fmt("DP middle AP on 16 GHz in %d/20 runs, including the best run (U %.3f)", middle16,
           best->result.energy.value()));
  const auto &d = dp.summary, &m = minint.summary;
  note(o, d.energy.mean > m.energy.mean && d.weighted_throughput.mean > m.weighted_throughput.mean && beats == 20,
       metrics("DP", d) + " vs " + metrics("MinInt-Wifi", m) + fmt(", every DP run better on both: %d/20", beats));
  return o;
}

Outcome grid_experiments() {
  Outcome o;
  const auto t0 = Clock::now();
  for (const char* name : {"grid16-unweighted", "grid16-weighted"}) {
    const auto dp = batch(name, "dp-exact", 20, 1).summary.weighted_throughput.mean;
    const auto greedy = batch(name, "greedy", 20, 1).summary.weighted_throughput.mean;
    const auto minint = batch(name, "minint-wifi", 20, 1).summary.weighted_throughput.mean;
    const double g = greedy / dp, m = minint / dp;
    note(o, dp > greedy && greedy > minint && m < 0.6 && g >= 0.70 && g <= 0.95,
         fmt("%s thr DP %.2f, Greedy %.2f (%.3f), MinInt-Wifi %.2f (%.3f)", name, dp, greedy, g, minint, m));
  }
  const double secs = seconds_since(t0);
  note(o, secs < 1800.0, fmt("%.1f s", secs));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  Outcome o;
  BatchConfig cfg;
  cfg.scenario = "grid16-weighted";
  cfg.runs = 3;
  cfg.iterations = 20000;
  cfg.seed = 42;
  cfg.record_every = 500;
  const auto a = trajectory_csv(run_batch(cfg));
  const auto b = trajectory_csv(run_batch(cfg));
  note(o, a == b, fmt("library batch CSV identical (%zu bytes)", a.size()));

  const fs::path dir = fs::temp_directory_path() / "mbpf_acceptance_determinism";
  fs::remove_all(dir);
  const std::string flags = " run --scenario line3-2ch --policy dp-approx --scheme client --runs 4 --iters 5000 "
                            "--seed 9 --record-every 100 --out-dir ";
  bool same = true;
  std::string first_csv, first_json;
  for (int k = 0; k < 2; ++k) {
    const fs::path out = dir / std::to_string(k);
    const std::string cmd = std::string("\"") + MBPF_CLI_PATH + "\"" + flags + "\"" + out.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      note(o, false, "CLI invocation failed");
      return o;
    }
    const auto csv = slurp(out / "trajectory.csv"), json = slurp(out / "summary.json");
    if (k == 0) {
      first_csv = csv;
      first_json = json;
    } else {
      same = csv == first_csv && json == first_json && !csv.empty();
    }
  }
  note(o, same, fmt("two CLI invocations byte-identical (%zu-byte CSV)", first_csv.size()));
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"radio numerics", radio_numerics},
      {"schedule/access optimality", schedule_and_access_optimality},
      {"energy identity", energy_identity},
      {"delta-U correctness", delta_u_correctness},
      {"Monte-Carlo agreement", monte_carlo_agreement},
      {"micro-instance convergence", micro_convergence},
      {"fixed-temperature Gibbs measure", gibbs_measure},
      {"line, one channel", line_one_channel},
      {"line, two channels", line_two_channels},
      {"grid, unweighted and weighted", grid_experiments},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s  %2zu %-32s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
