#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "mbpf/model.hpp"
#include "mbpf/rng.hpp"

namespace mbpf {

/// Value of sum_i w_i log r_i, or an explicit marker when some client has
/// zero throughput (the objective is -infinity there).
class Energy {
 public:
  Energy() = default;
  explicit Energy(double value) : value_(value), feasible_(true) {}
  static Energy infeasible() { return Energy{}; }

  bool feasible() const noexcept { return feasible_; }
  explicit operator bool() const noexcept { return feasible_; }

  // -infinity when infeasible.
  double value() const noexcept { return feasible_ ? value_ : -std::numeric_limits<double>::infinity(); }

  friend Energy operator+(Energy a, Energy b) {
    return a.feasible_ && b.feasible_ ? Energy(a.value_ + b.value_) : infeasible();
  }
  friend Energy operator-(Energy a, Energy b) {
    if (!b.feasible_) throw std::logic_error("energy difference against an infeasible reference");
    return a.feasible_ ? Energy(a.value_ - b.value_) : infeasible();
  }

 private:
  double value_ = 0.0;
  bool feasible_ = false;
};

// x log(x / z) with 0 log 0 = 0.
inline double xlogx_over(double x, double z) noexcept { return x > 0.0 ? x * std::log(x / z) : 0.0; }

struct Allocation {
  Scheme scheme = Scheme::ServerCentric;
  std::vector<double> schedule;  // phi_{i,n(i)}, per client
  std::vector<double> access;    // p_n per virtual AP (server-centric) or p_i per client (client-contention)
};

struct ThroughputReport {
  std::vector<double> rates;  // r_i, Mbps per slot
  Energy energy;              // sum_i w_i log r_i
  double weighted_throughput = 0.0;
};

// phi_{i,n(i)} = w_i / w^{n(i)}.
inline std::vector<double> optimal_schedule(const Network& net, const Configuration& cfg,
                                            const WeightAggregates& agg) {
  std::vector<double> phi(net.num_clients());
  for (std::size_t i = 0; i < net.num_clients(); ++i) phi[i] = net.weight(i) / agg.w[cfg.association[i]];
  return phi;
}

// p_n = w^n / z^n (0 for clientless APs), or p_i = w_i / z^{n(i)}.
inline std::vector<double> optimal_access(const Network& net, const Configuration& cfg, const WeightAggregates& agg,
                                          Scheme scheme) {
  std::vector<double> p;
  if (scheme == Scheme::ServerCentric) {
    p.resize(net.num_vaps());
    for (std::size_t n = 0; n < net.num_vaps(); ++n) p[n] = agg.count[n] == 0 ? 0.0 : agg.w[n] / agg.z[n];
  } else {
    p.resize(net.num_clients());
    for (std::size_t i = 0; i < net.num_clients(); ++i) p[i] = net.weight(i) / agg.z[cfg.association[i]];
  }
  return p;
}

inline Allocation optimal_allocation(const Network& net, const Configuration& cfg, Scheme scheme) {
  const auto agg = compute_aggregates(net, cfg);
  Allocation a;
  a.scheme = scheme;
  a.schedule = optimal_schedule(net, cfg, agg);
  a.access = optimal_access(net, cfg, agg, scheme);
  return a;
}

namespace detail {

inline std::vector<std::vector<ClientIndex>> members_by_ap(const Network& net, const Configuration& cfg) {
  std::vector<std::vector<ClientIndex>> members(net.num_vaps());
  for (std::size_t i = 0; i < net.num_clients(); ++i) members[cfg.association[i]].push_back(i);
  return members;
}

inline void validate_allocation(const Network& net, const Configuration& cfg, const Allocation& alloc) {
  if (!is_well_formed(net, cfg)) throw std::invalid_argument("configuration does not match the network");
  const std::size_t expected = alloc.scheme == Scheme::ServerCentric ? net.num_vaps() : net.num_clients();
  if (alloc.access.size() != expected || alloc.schedule.size() != net.num_clients())
    throw std::invalid_argument("allocation sizes do not match the network");
  for (double p : alloc.access)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("access probability outside [0, 1]");
  for (double f : alloc.schedule)
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("schedule probability outside [0, 1]");
}

}  // namespace detail

/// Per-client throughput under a given allocation.
///
/// Server-centric: r_i = B phi_i p_n prod (1 - p_m) over the other
/// same-channel interferers m of n. Client-contention: r_i = B p_i
/// prod (1 - p_j) over the other clients j whose APs interfere with n(i) on
/// its channel.
inline ThroughputReport throughput(const Network& net, const Configuration& cfg, const Allocation& alloc) {
  detail::validate_allocation(net, cfg, alloc);
  ThroughputReport rep;
  rep.rates.assign(net.num_clients(), 0.0);
  const auto& g = net.graph();
  if (alloc.scheme == Scheme::ServerCentric) {
    std::vector<double> success(net.num_vaps());
    for (std::size_t n = 0; n < net.num_vaps(); ++n) {
      double s = alloc.access[n];
      for (ApIndex m : g.neighbors(cfg.channel[n], n))
        if (m != n && cfg.channel[m] == cfg.channel[n]) s *= 1.0 - alloc.access[m];
      success[n] = s;
    }
    for (std::size_t i = 0; i < net.num_clients(); ++i)
      rep.rates[i] = net.rate(cfg, i) * alloc.schedule[i] * success[cfg.association[i]];
  } else {
    const auto members = detail::members_by_ap(net, cfg);
    for (std::size_t i = 0; i < net.num_clients(); ++i) {
      const ApIndex n = cfg.association[i];
      double s = alloc.access[i];
      for (ApIndex m : g.neighbors(cfg.channel[n], n)) {
        if (cfg.channel[m] != cfg.channel[n]) continue;
        for (ClientIndex j : members[m])
          if (j != i) s *= 1.0 - alloc.access[j];
      }
      rep.rates[i] = net.rate(cfg, i) * s;
    }
  }
  double u = 0.0;
  bool feasible = true;
  for (std::size_t i = 0; i < net.num_clients(); ++i) {
    rep.weighted_throughput += net.weight(i) * rep.rates[i];
    if (rep.rates[i] > 0.0)
      u += net.weight(i) * std::log(rep.rates[i]);
    else
      feasible = false;
  }
  rep.energy = feasible ? Energy(u) : Energy::infeasible();
  return rep;
}

inline ThroughputReport optimal_throughput(const Network& net, const Configuration& cfg, Scheme scheme) {
  return throughput(net, cfg, optimal_allocation(net, cfg, scheme));
}

/// Closed-form energy U(psi): sum_i w_i log r_i with the optimal schedule and
/// access probabilities substituted.
///
/// Server-centric:
///   sum_i w_i [log B_i + log(w_i / w^{n(i)})]
///   + sum_n [w^n log(w^n / z^n) + (z^n - w^n) log((z^n - w^n) / z^n)]
/// Client-contention:
///   sum_i [w_i log(B_i w_i / z^{n(i)}) + (z^{n(i)} - w_i) log((z^{n(i)} - w_i) / z^{n(i)})]
inline Energy energy(const Network& net, const Configuration& cfg, const WeightAggregates& agg, Scheme scheme) {
  if (!is_well_formed(net, cfg)) throw std::invalid_argument("configuration does not match the network");
  // Extended precision: U is a sum of large terms that can nearly cancel.
  using Real = long double;
  auto xlogx = [](Real x, Real z) -> Real { return x > 0 ? x * std::log(x / z) : 0; };
  Real u = 0;
  for (std::size_t i = 0; i < net.num_clients(); ++i) {
    const Real b = net.rate(cfg, i);
    if (!(b > 0)) return Energy::infeasible();
    const Real wi = net.weight(i);
    const ApIndex n = cfg.association[i];
    const Real z = agg.z[n];
    if (scheme == Scheme::ServerCentric)
      u += wi * (std::log(b) + std::log(wi / agg.w[n]));
    else
      u += wi * std::log(b * wi / z) + xlogx(z - wi, z);
  }
  if (scheme == Scheme::ServerCentric)
    for (std::size_t n = 0; n < net.num_vaps(); ++n) {
      if (agg.count[n] == 0) continue;
      const Real w = agg.w[n], z = agg.z[n];
      u += xlogx(w, z) + xlogx(z - w, z);
    }
  return Energy(static_cast<double>(u));
}

inline Energy energy(const Network& net, const Configuration& cfg, Scheme scheme) {
  return energy(net, cfg, compute_aggregates(net, cfg), scheme);
}

/// Slot-level simulation of the random-access protocol.
///
/// Every slot, each AP (or client) transmits independently with its access
/// probability. A transmission succeeds iff no other same-channel interferer
/// transmits; on success a server-centric AP serves one client drawn by phi.
/// Returns the empirical mean rate per client.
inline std::vector<double> slot_monte_carlo(const Network& net, const Configuration& cfg, const Allocation& alloc,
                                            std::uint64_t slots, std::uint64_t seed) {
  detail::validate_allocation(net, cfg, alloc);
  if (slots == 0) throw std::invalid_argument("slot_monte_carlo needs at least one slot");
  Rng rng(seed);
  const auto& g = net.graph();
  const auto members = detail::members_by_ap(net, cfg);
  std::vector<std::vector<ApIndex>> others(net.num_vaps());
  for (std::size_t n = 0; n < net.num_vaps(); ++n)
    for (ApIndex m : g.neighbors(cfg.channel[n], n))
      if (m != n && cfg.channel[m] == cfg.channel[n]) others[n].push_back(m);

  std::vector<std::uint64_t> wins(net.num_clients(), 0);
  if (alloc.scheme == Scheme::ServerCentric) {
    std::vector<char> tx(net.num_vaps());
    for (std::uint64_t s = 0; s < slots; ++s) {
      for (std::size_t n = 0; n < net.num_vaps(); ++n) tx[n] = rng.bernoulli(alloc.access[n]);
      for (std::size_t n = 0; n < net.num_vaps(); ++n) {
        if (!tx[n] || members[n].empty()) continue;
        bool collided = false;
        for (ApIndex m : others[n]) collided = collided || tx[m];
        if (collided) continue;
        double u = rng.uniform();
        ClientIndex chosen = members[n].back();
        for (ClientIndex i : members[n]) {
          if (u < alloc.schedule[i]) {
            chosen = i;
            break;
          }
          u -= alloc.schedule[i];
        }
        ++wins[chosen];
      }
    }
  } else {
    std::vector<char> tx(net.num_clients());
    std::vector<std::uint32_t> per_ap(net.num_vaps());
    for (std::uint64_t s = 0; s < slots; ++s) {
      std::fill(per_ap.begin(), per_ap.end(), 0);
      for (std::size_t i = 0; i < net.num_clients(); ++i) {
        tx[i] = rng.bernoulli(alloc.access[i]);
        per_ap[cfg.association[i]] += tx[i];
      }
      for (std::size_t i = 0; i < net.num_clients(); ++i) {
        if (!tx[i]) continue;
        const ApIndex n = cfg.association[i];
        std::uint32_t contenders = per_ap[n];
        for (ApIndex m : others[n]) contenders += per_ap[m];
        if (contenders == 1) ++wins[i];
      }
    }
  }
  std::vector<double> rates(net.num_clients());
  for (std::size_t i = 0; i < net.num_clients(); ++i)
    rates[i] = net.rate(cfg, i) * static_cast<double>(wins[i]) / static_cast<double>(slots);
  return rates;
}

}  // namespace mbpf
