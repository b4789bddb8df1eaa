#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mbpf/fairness.hpp"
#include "mbpf/model.hpp"
#include "mbpf/rng.hpp"

namespace mbpf {

/// Temperature schedule T(t), t >= 1.
///
/// InverseSqrtLog, T0 / sqrt(log(t + 2)), goes to zero while T(t) log t
/// still diverges, which is what global convergence of the sampler needs.
/// The other kinds cool faster (or not at all) without that guarantee.
struct AnnealingSchedule {
  enum class Kind { InverseSqrtLog, InverseLog, Geometric, Constant };

  Kind kind = Kind::InverseSqrtLog;
  double t0 = 1.0;     // initial temperature, or the fixed value for Constant
  double ratio = 0.999;  // Geometric only

  double temperature(std::uint64_t t) const {
    const double x = static_cast<double>(t);
    switch (kind) {
      case Kind::InverseSqrtLog: return t0 / std::sqrt(std::log(x + 2.0));
      case Kind::InverseLog: return t0 / std::log(x + 2.0);
      case Kind::Geometric: return std::max(t0 * std::pow(ratio, x), std::numeric_limits<double>::min());
      case Kind::Constant: return t0;
    }
    return t0;
  }

  // "invsqrtlog", "invlog", "geometric:<ratio>", "const:<T>".
  static AnnealingSchedule parse(std::string_view text, double t0 = 1.0) {
    AnnealingSchedule s;
    s.t0 = t0;
    auto number_after_colon = [&](std::string_view prefix) {
      const std::string rest(text.substr(prefix.size()));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(rest, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != rest.size()) throw std::invalid_argument("bad schedule '" + std::string(text) + "'");
      return v;
    };
    if (text == "invsqrtlog") {
      s.kind = Kind::InverseSqrtLog;
    } else if (text == "invlog") {
      s.kind = Kind::InverseLog;
    } else if (text.starts_with("geometric:")) {
      s.kind = Kind::Geometric;
      s.ratio = number_after_colon("geometric:");
      if (!(s.ratio > 0.0 && s.ratio < 1.0)) throw std::invalid_argument("geometric ratio must be in (0, 1)");
    } else if (text.starts_with("const:")) {
      s.kind = Kind::Constant;
      s.t0 = number_after_colon("const:");
    } else {
      throw std::invalid_argument("unknown schedule '" + std::string(text) + "'");
    }
    if (!(s.t0 > 0.0)) throw std::invalid_argument("schedule temperature must be positive");
    return s;
  }
};

enum class PolicyKind { DpExact, DpApprox, Greedy };
enum class SelectionOrder { RoundRobin, UniformRandom };

inline const char* to_string(PolicyKind k) noexcept {
  switch (k) {
    case PolicyKind::DpExact: return "dp-exact";
    case PolicyKind::DpApprox: return "dp-approx";
    case PolicyKind::Greedy: return "greedy";
  }
  return "?";
}

struct OptimizerPolicy {
  PolicyKind kind = PolicyKind::DpExact;
  Scheme scheme = Scheme::ServerCentric;
  SelectionOrder order = SelectionOrder::RoundRobin;
  AnnealingSchedule schedule;  // ignored by Greedy
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
  std::uint64_t record_every = 1000;
};

/// Configuration plus incrementally maintained aggregates.
///
/// Per-AP sums are refreshed from scratch (ascending client / AP order) for
/// every AP a move touches, so they always equal compute_aggregates() bit
/// for bit. Energy differences use the per-AP decomposition
///   U = sum_n E_n,  E_n = S_n + L_n - w^n log z^n + tail_n
/// with S_n = sum w_i log B_i and L_n = sum w_i log w_i over n's clients, and
///   tail_n = (z^n - w^n) log((z^n - w^n) / z^n)              (server-centric)
///   tail_n = sum_i (z^n - w_i) log((z^n - w_i) / z^n)        (client-contention)
/// E_n depends only on n's clients and z^n, so a move changes only the terms
/// of the APs whose client set or z changes.
class AnnealingState {
 public:
  AnnealingState(const Network& net, Configuration cfg, Scheme scheme)
      : net_(&net), cfg_(std::move(cfg)), scheme_(scheme) {
    if (!is_well_formed(net, cfg_)) throw std::invalid_argument("configuration does not match the network");
    members_.assign(net.num_vaps(), {});
    for (std::size_t i = 0; i < net.num_clients(); ++i) members_[cfg_.association[i]].push_back(i);
    agg_ = compute_aggregates(net, cfg_);
    s_.assign(net.num_vaps(), 0.0);
    l_.assign(net.num_vaps(), 0.0);
    for (std::size_t n = 0; n < net.num_vaps(); ++n) refresh_sums(n);
  }

  const Network& network() const noexcept { return *net_; }
  const Configuration& config() const noexcept { return cfg_; }
  const WeightAggregates& aggregates() const noexcept { return agg_; }
  Scheme scheme() const noexcept { return scheme_; }
  const std::vector<ClientIndex>& members(ApIndex n) const noexcept { return members_[n]; }

  bool feasible() const noexcept { return is_feasible(*net_, cfg_); }
  Energy energy() const { return mbpf::energy(*net_, cfg_, agg_, scheme_); }

  // Same-channel interferers of n on its current channel, n included.
  template <class F>
  void for_each_same_channel(ApIndex n, F&& f) const {
    const ChannelIndex c = cfg_.channel[n];
    for (ApIndex m : net_->graph().neighbors(c, n))
      if (cfg_.channel[m] == c) f(m);
  }

  /// U(psi with n(i) = target) - U(psi).
  Energy delta_association(ClientIndex i, ApIndex target) const {
    const ApIndex from = cfg_.association[i];
    if (target == from) return Energy(0.0);
    const double b = net_->rate(i, target, cfg_.channel[target]);
    if (!(b > 0.0)) return Energy::infeasible();
    const double wi = net_->weight(i);
    const double wlogb_old = wi * std::log(net_->rate(cfg_, i));
    const double wlogb_new = wi * std::log(b);
    const double wlogw = wi * std::log(wi);

    auto& affected = scratch_;
    affected.clear();
    for_each_same_channel(from, [&](ApIndex m) { affected.push_back(m); });
    for_each_same_channel(target, [&](ApIndex m) { affected.push_back(m); });
    std::sort(affected.begin(), affected.end());
    affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

    double delta = 0.0;
    for (ApIndex m : affected) {
      const double before = term(m, agg_.w[m], agg_.z[m], s_[m], l_[m], agg_.count[m], kNone, kNone, 0.0);
      double w = agg_.w[m], z = agg_.z[m], s = s_[m], l = l_[m];
      std::size_t count = agg_.count[m];
      ClientIndex skip = kNone, add = kNone;
      if (m == from) {
        w = count == 1 ? 0.0 : w - wi;
        s -= wlogb_old;
        l -= wlogw;
        --count;
        skip = i;
      }
      if (m == target) {
        w += wi;
        s += wlogb_new;
        l += wlogw;
        ++count;
        add = i;
      }
      if (same_channel_interferer(*net_, cfg_, m, from)) z -= wi;
      if (same_channel_interferer(*net_, cfg_, m, target)) z += wi;
      delta += term(m, w, z, s, l, count, skip, add, wi) - before;
    }
    return Energy(delta);
  }

  /// U(psi with c(n) = target) - U(psi).
  Energy delta_channel(ApIndex n, ChannelIndex target) const {
    const ChannelIndex from = cfg_.channel[n];
    if (target == from) return Energy(0.0);
    double s_new = 0.0;
    for (ClientIndex i : members_[n]) {
      const double b = net_->rate(i, n, target);
      if (!(b > 0.0)) return Energy::infeasible();
      s_new += net_->weight(i) * std::log(b);
    }
    if (agg_.count[n] == 0) return Energy(0.0);
    const double wn = agg_.w[n];
    const auto& g = net_->graph();

    double delta = 0.0;
    double z_n_new = wn;
    for (ApIndex m : g.neighbors(target, n)) {
      if (m == n || cfg_.channel[m] != target) continue;
      z_n_new += agg_.w[m];
      const double before = term(m, agg_.w[m], agg_.z[m], s_[m], l_[m], agg_.count[m], kNone, kNone, 0.0);
      delta += term(m, agg_.w[m], agg_.z[m] + wn, s_[m], l_[m], agg_.count[m], kNone, kNone, 0.0) - before;
    }
    for (ApIndex m : g.neighbors(from, n)) {
      if (m == n || cfg_.channel[m] != from) continue;
      const double before = term(m, agg_.w[m], agg_.z[m], s_[m], l_[m], agg_.count[m], kNone, kNone, 0.0);
      delta += term(m, agg_.w[m], agg_.z[m] - wn, s_[m], l_[m], agg_.count[m], kNone, kNone, 0.0) - before;
    }
    const double before = term(n, wn, agg_.z[n], s_[n], l_[n], agg_.count[n], kNone, kNone, 0.0);
    delta += term(n, wn, z_n_new, s_new, l_[n], agg_.count[n], kNone, kNone, 0.0) - before;
    return Energy(delta);
  }

  /// Local association score whose softmax over candidate APs approximates
  /// the exact move distribution when neighborhood loads dwarf w_i.
  ///
  /// Server-centric: w_i log(B w_i / z^n prod_{m != n} (z^m - w^m) / z^m),
  /// with aggregates taken as if i were already at n; candidate-independent
  /// constants are dropped. Client-contention uses the client-side analogue,
  ///   w_i log(B w_i / (z^n_{-i} + w_i) prod_j (z^{n(j)}_{-i} - w_j + w_i) / (z^{n(j)}_{-i} + w_i))
  ///   - z^n_{-i} log((z^n_{-i} + w_i) / z^n_{-i}).
  Energy approx_association_score(ClientIndex i, ApIndex target) const {
    const double b = net_->rate(i, target, cfg_.channel[target]);
    if (!(b > 0.0)) return Energy::infeasible();
    const ApIndex from = cfg_.association[i];
    const double wi = net_->weight(i);
    // z^m_{-i}: neighborhood load with i removed from its current AP.
    auto z_without = [&](ApIndex m) {
      return same_channel_interferer(*net_, cfg_, m, from) ? agg_.z[m] - wi : agg_.z[m];
    };
    if (scheme_ == Scheme::ServerCentric) {
      double log_sum = std::log(b * wi / (z_without(target) + wi));
      for_each_same_channel(target, [&](ApIndex m) {
        if (m == target) return;
        const double w = m == from ? agg_.w[m] - wi : agg_.w[m];
        const double z = z_without(m) + wi;
        log_sum += std::log((z - w) / z);
      });
      return Energy(wi * log_sum);
    }
    const double zt = z_without(target);
    double log_sum = std::log(b * wi / (zt + wi));
    for_each_same_channel(target, [&](ApIndex m) {
      const double zm = z_without(m) + wi;
      for (ClientIndex j : members_[m])
        if (j != i) log_sum += std::log((zm - net_->weight(j)) / zm);
    });
    const double tail = zt > 0.0 ? zt * std::log((zt + wi) / zt) : 0.0;
    return Energy(wi * log_sum - tail);
  }

  void move_client(ClientIndex i, ApIndex target) {
    const ApIndex from = cfg_.association[i];
    if (target == from) return;
    auto& src = members_[from];
    src.erase(std::find(src.begin(), src.end(), i));
    auto& dst = members_[target];
    dst.insert(std::upper_bound(dst.begin(), dst.end(), i), i);
    cfg_.association[i] = target;
    refresh_sums(from);
    refresh_sums(target);
    for_each_same_channel(from, [&](ApIndex m) { refresh_z(m); });
    for_each_same_channel(target, [&](ApIndex m) { refresh_z(m); });
  }

  void move_channel(ApIndex n, ChannelIndex target) {
    if (target == cfg_.channel[n]) return;
    auto& old_neighbors = scratch_;
    old_neighbors.clear();
    for_each_same_channel(n, [&](ApIndex m) { old_neighbors.push_back(m); });
    cfg_.channel[n] = target;
    refresh_sums(n);
    for (ApIndex m : old_neighbors) refresh_z(m);
    for_each_same_channel(n, [&](ApIndex m) { refresh_z(m); });
  }

 private:
  static constexpr ClientIndex kNone = static_cast<ClientIndex>(-1);

  // E_m for hypothetical aggregates; `skip` / `add` adjust m's member list
  // for the client-contention tail.
  double term(ApIndex m, double w, double z, double s, double l, std::size_t count, ClientIndex skip,
              ClientIndex add, double w_add) const {
    if (count == 0) return 0.0;
    double e = s + l - w * std::log(z);
    if (scheme_ == Scheme::ServerCentric) return e + xlogx_over(z - w, z);
    for (ClientIndex j : members_[m])
      if (j != skip) e += xlogx_over(z - net_->weight(j), z);
    if (add != kNone) e += xlogx_over(z - w_add, z);
    return e;
  }

  void refresh_sums(ApIndex n) {
    double w = 0.0, s = 0.0, l = 0.0;
    for (ClientIndex i : members_[n]) {
      const double wi = net_->weight(i);
      w += wi;
      s += wi * std::log(net_->rate(i, n, cfg_.channel[n]));
      l += wi * std::log(wi);
    }
    agg_.w[n] = w;
    agg_.count[n] = members_[n].size();
    s_[n] = s;
    l_[n] = l;
  }

  void refresh_z(ApIndex m) { agg_.z[m] = neighborhood_load(*net_, cfg_, agg_.w, m); }

  const Network* net_;
  Configuration cfg_;
  Scheme scheme_;
  std::vector<std::vector<ClientIndex>> members_;
  WeightAggregates agg_;
  std::vector<double> s_;
  std::vector<double> l_;
  mutable std::vector<ApIndex> scratch_;
};

inline Energy delta_u_association(const AnnealingState& st, ClientIndex i, ApIndex target) {
  return st.delta_association(i, target);
}
inline Energy delta_u_association_approx(const AnnealingState& st, ClientIndex i, ApIndex target) {
  return st.approx_association_score(i, target);
}
inline Energy delta_u_channel(const AnnealingState& st, ApIndex n, ChannelIndex target) {
  return st.delta_channel(n, target);
}

struct Candidate {
  std::size_t target = 0;
  Energy value;  // exact delta-U, or approximate score
  double probability = 0.0;
};

struct MoveProposal {
  enum class Mover { Client, AccessPoint };
  Mover mover_kind = Mover::Client;
  std::size_t mover = 0;
  std::vector<Candidate> candidates;
  std::size_t current = 0;  // index into candidates of the mover's present state
  std::optional<std::size_t> chosen;
  double temperature = 0.0;
  bool exact = true;  // whether candidate values are exact delta-U
};

// Values within this of the incumbent count as ties.
inline constexpr double kTieTolerance = 1e-10;

// Argmax over feasible candidates; keeps `current` unless something is
// strictly better, otherwise the lowest index among the best.
inline std::size_t select_argmax(const std::vector<Candidate>& cands, std::size_t current) {
  std::size_t best = current;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    if (!cands[k].value.feasible()) continue;
    if (!cands[best].value.feasible() || cands[k].value.value() > cands[best].value.value() + kTieTolerance)
      best = k;
  }
  return best;
}

/// Fills in softmax probabilities exp(v / T) / sum exp(v / T), computed with
/// the maximum subtracted. Infeasible candidates get exactly zero. T <= 0
/// puts all mass on select_argmax().
inline void assign_probabilities(std::vector<Candidate>& cands, std::size_t current, double temperature) {
  for (auto& c : cands) c.probability = 0.0;
  if (cands.empty()) return;
  if (!(temperature > 0.0)) {
    cands[select_argmax(cands, current)].probability = 1.0;
    return;
  }
  double vmax = -std::numeric_limits<double>::infinity();
  for (const auto& c : cands)
    if (c.value.feasible()) vmax = std::max(vmax, c.value.value());
  if (!std::isfinite(vmax)) return;
  double total = 0.0;
  for (auto& c : cands) {
    if (!c.value.feasible()) continue;
    c.probability = std::exp((c.value.value() - vmax) / temperature);
    total += c.probability;
  }
  for (auto& c : cands) c.probability /= total;
}

inline std::optional<std::size_t> sample_candidate(const std::vector<Candidate>& cands, Rng& rng) {
  std::optional<std::size_t> last;
  for (std::size_t k = 0; k < cands.size(); ++k)
    if (cands[k].probability > 0.0) last = k;
  if (!last) return std::nullopt;
  double u = rng.uniform();
  for (std::size_t k = 0; k < cands.size(); ++k) {
    if (cands[k].probability <= 0.0) continue;
    if (u < cands[k].probability) return k;
    u -= cands[k].probability;
  }
  return last;
}

struct MoverChoice {
  MoveProposal::Mover kind;
  std::size_t index;
};

// Round robin visits every client, then every AP, once per sweep.
inline MoverChoice select_mover(const Network& net, std::uint64_t t, SelectionOrder order, Rng& rng) {
  const std::uint64_t total = net.num_clients() + net.num_vaps();
  const std::uint64_t k = order == SelectionOrder::RoundRobin ? (t - 1) % total : rng.index(total);
  if (k < net.num_clients()) return {MoveProposal::Mover::Client, static_cast<std::size_t>(k)};
  return {MoveProposal::Mover::AccessPoint, static_cast<std::size_t>(k - net.num_clients())};
}

// Candidate list for a mover: feasible APs for a client, every channel for an AP.
inline MoveProposal propose(const AnnealingState& st, MoverChoice who, bool exact) {
  const Network& net = st.network();
  MoveProposal prop;
  prop.mover_kind = who.kind;
  prop.mover = who.index;
  prop.exact = exact || who.kind == MoveProposal::Mover::AccessPoint;
  if (who.kind == MoveProposal::Mover::Client) {
    const ClientIndex i = who.index;
    for (ApIndex n : feasible_aps(net, st.config().channel, i)) {
      if (n == st.config().association[i]) prop.current = prop.candidates.size();
      prop.candidates.push_back({n, exact ? st.delta_association(i, n) : st.approx_association_score(i, n), 0.0});
    }
  } else {
    const ApIndex n = who.index;
    for (std::size_t c = 0; c < net.num_channels(); ++c) {
      if (c == st.config().channel[n]) prop.current = prop.candidates.size();
      prop.candidates.push_back({c, st.delta_channel(n, c), 0.0});
    }
  }
  return prop;
}

inline void apply(AnnealingState& st, const MoveProposal& prop) {
  if (!prop.chosen) return;
  const std::size_t target = prop.candidates[*prop.chosen].target;
  if (prop.mover_kind == MoveProposal::Mover::Client)
    st.move_client(prop.mover, target);
  else
    st.move_channel(prop.mover, target);
}

/// One Gibbs-sampler move at time t (t >= 1).
inline MoveProposal gibbs_step(AnnealingState& st, std::uint64_t t, const OptimizerPolicy& policy, Rng& rng) {
  if (t == 0) throw std::invalid_argument("gibbs_step: t starts at 1");
  const auto who = select_mover(st.network(), t, policy.order, rng);
  auto prop = propose(st, who, policy.kind != PolicyKind::DpApprox);
  prop.temperature = policy.schedule.temperature(t);
  if (prop.candidates.empty()) return prop;  // nothing feasible: no-op
  assign_probabilities(prop.candidates, prop.current, prop.temperature);
  prop.chosen = sample_candidate(prop.candidates, rng);
  apply(st, prop);
  return prop;
}

/// One steepest-ascent move: the mover takes its best candidate.
inline MoveProposal greedy_step(AnnealingState& st, std::uint64_t t, const OptimizerPolicy& policy, Rng& rng) {
  const auto who = select_mover(st.network(), t, policy.order, rng);
  auto prop = propose(st, who, true);
  if (prop.candidates.empty()) return prop;
  assign_probabilities(prop.candidates, prop.current, 0.0);
  prop.chosen = select_argmax(prop.candidates, prop.current);
  apply(st, prop);
  return prop;
}

// No single client or AP move raises U by more than `tol`.
inline bool is_local_maximum(const AnnealingState& st, double tol = kTieTolerance) {
  const Network& net = st.network();
  for (std::size_t i = 0; i < net.num_clients(); ++i)
    for (ApIndex n : feasible_aps(net, st.config().channel, i))
      if (auto d = st.delta_association(i, n); d && d.value() > tol) return false;
  for (std::size_t n = 0; n < net.num_vaps(); ++n)
    for (std::size_t c = 0; c < net.num_channels(); ++c)
      if (auto d = st.delta_channel(n, c); d && d.value() > tol) return false;
  return true;
}

/// Random channel per radio, then each client on its closest radio with a
/// nonzero rate, ties broken at random. Channel maps leaving some client
/// without a usable radio are redrawn.
/// Radios with a pinned channel keep it on every draw.
inline Configuration initial_configuration(const Network& net, Rng& rng,
                                           std::span<const std::optional<ChannelIndex>> pinned = {}) {
  if (!pinned.empty() && pinned.size() != net.num_vaps()) throw std::invalid_argument("pinned channel list size mismatch");
  for (std::size_t i = 0; i < net.num_clients(); ++i)
    if (!net.reachable(i)) throw ScenarioError("client '" + net.clients()[i].id + "' cannot reach any access point");
  constexpr int kMaxDraws = 1000;
  Configuration cfg;
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    cfg.channel.assign(net.num_vaps(), 0);
    for (std::size_t n = 0; n < net.num_vaps(); ++n) {
      cfg.channel[n] = static_cast<ChannelIndex>(rng.index(net.num_channels()));
      if (!pinned.empty() && pinned[n]) cfg.channel[n] = *pinned[n];
    }
    cfg.association.assign(net.num_clients(), 0);
    bool ok = true;
    for (std::size_t i = 0; i < net.num_clients() && ok; ++i) {
      std::vector<ApIndex> closest;
      double best = std::numeric_limits<double>::infinity();
      for (ApIndex n : feasible_aps(net, cfg.channel, i)) {
        const double d = distance(net.clients()[i].position, net.vaps()[n].position);
        if (d < best) {
          best = d;
          closest.assign(1, n);
        } else if (d == best) {
          closest.push_back(n);
        }
      }
      if (closest.empty())
        ok = false;
      else
        cfg.association[i] = closest[closest.size() == 1 ? 0 : rng.index(closest.size())];
    }
    if (ok) return cfg;
  }
  throw ScenarioError("no random channel assignment lets every client reach an access point");
}

struct TrajectoryPoint {
  std::uint64_t t = 0;
  double temperature = 0.0;
  Energy energy;
  double weighted_throughput = 0.0;
  std::uint64_t config_hash = 0;
};

struct RunResult {
  std::string policy;
  Scheme scheme = Scheme::ServerCentric;
  std::uint64_t seed = 0;
  std::vector<TrajectoryPoint> trajectory;
  Configuration initial;
  Configuration final_config;
  Allocation allocation;
  ThroughputReport report;
  Energy energy;               // U of the final configuration
  std::uint64_t iterations_run = 0;
  bool converged = false;      // Greedy reached a fixed point
};

inline TrajectoryPoint snapshot(const AnnealingState& st, std::uint64_t t, double temperature) {
  const auto rep = throughput(st.network(), st.config(),
                              Allocation{st.scheme(), optimal_schedule(st.network(), st.config(), st.aggregates()),
                                         optimal_access(st.network(), st.config(), st.aggregates(), st.scheme())});
  return {t, temperature, st.energy(), rep.weighted_throughput, config_hash(st.config())};
}

inline void finish(RunResult& res, const AnnealingState& st) {
  res.final_config = st.config();
  res.allocation = optimal_allocation(st.network(), st.config(), st.scheme());
  res.report = throughput(st.network(), st.config(), res.allocation);
  res.energy = st.energy();
}

/// Runs the slow-timescale optimizer from the given start.
///
/// Records (t, T, U, sum w r, hash) at t = 0, every `record_every` steps, and
/// at the last step. Greedy under round robin stops once a full sweep makes
/// no change.
inline RunResult run(const Network& net, Configuration start, const OptimizerPolicy& policy, Rng& rng) {
  RunResult res;
  res.policy = to_string(policy.kind);
  res.scheme = policy.scheme;
  res.seed = policy.seed;
  res.initial = start;
  AnnealingState st(net, std::move(start), policy.scheme);
  if (!st.feasible()) throw ScenarioError("initial configuration is infeasible");
  const bool greedy = policy.kind == PolicyKind::Greedy;
  const std::uint64_t sweep = net.num_clients() + net.num_vaps();
  res.trajectory.push_back(snapshot(st, 0, greedy ? 0.0 : policy.schedule.temperature(1)));
  std::uint64_t unchanged = 0;
  std::uint64_t t = 1;
  double temperature = 0.0;
  for (; t <= policy.iterations; ++t) {
    MoveProposal prop;
    if (greedy) {
      prop = greedy_step(st, t, policy, rng);
    } else {
      prop = gibbs_step(st, t, policy, rng);
      temperature = prop.temperature;
    }
    const bool moved = prop.chosen && *prop.chosen != prop.current;
    unchanged = moved ? 0 : unchanged + 1;
    if (policy.record_every > 0 && t % policy.record_every == 0) res.trajectory.push_back(snapshot(st, t, temperature));
    if (greedy && policy.order == SelectionOrder::RoundRobin && unchanged >= sweep) {
      res.converged = true;
      ++t;
      break;
    }
  }
  res.iterations_run = t - 1;
  if (res.trajectory.back().t != res.iterations_run)
    res.trajectory.push_back(snapshot(st, res.iterations_run, temperature));
  finish(res, st);
  return res;
}

// Seeded end-to-end run: random initial configuration, then `policy`.
inline RunResult run(const Network& net, const OptimizerPolicy& policy,
                     std::span<const std::optional<ChannelIndex>> pinned = {}) {
  Rng rng(policy.seed);
  Rng init_rng = rng.split(0);
  Rng move_rng = rng.split(1);
  return run(net, initial_configuration(net, init_rng, pinned), policy, move_rng);
}

}  // namespace mbpf
