#pragma once

// Brute-force references for tests and acceptance checks. Nothing here
// calls the closed-form energy or the incremental annealing state; rates
// are assembled from the per-slot success probability directly.

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mbpf/fairness.hpp"
#include "mbpf/model.hpp"

namespace mbpf::oracle {

using mbpf::slot_monte_carlo;

class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr double kDefaultGuard = 1e6;

// Brute-force loads: w[n] and z[n] by scanning every client and AP pair.
struct Loads {
  std::vector<double> w, z;
  std::vector<int> clients;
};

inline Loads loads(const Network& net, const Configuration& cfg) {
  Loads L;
  const std::size_t N = net.num_vaps();
  L.w.assign(N, 0.0);
  L.z.assign(N, 0.0);
  L.clients.assign(N, 0);
  for (std::size_t i = 0; i < net.num_clients(); ++i) {
    L.w[cfg.association[i]] += net.weight(i);
    ++L.clients[cfg.association[i]];
  }
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t m = 0; m < N; ++m)
      if (cfg.channel[m] == cfg.channel[n] && net.graph().interferes(cfg.channel[n], n, m)) L.z[n] += L.w[m];
  return L;
}

// p_n prod_{m != n} (1 - p_m): probability AP n transmits alone.
inline double success_product_form(const Network& net, const Configuration& cfg, std::span<const double> p,
                                   ApIndex n) {
  double s = p[n];
  for (std::size_t m = 0; m < net.num_vaps(); ++m)
    if (m != n && cfg.channel[m] == cfg.channel[n] && net.graph().interferes(cfg.channel[n], n, m)) s *= 1.0 - p[m];
  return s;
}

// p_n / (1 - p_n) prod_{m, including n} (1 - p_m); requires p_n < 1.
inline double success_ratio_form(const Network& net, const Configuration& cfg, std::span<const double> p, ApIndex n) {
  if (!(p[n] < 1.0)) throw std::domain_error("ratio form is singular at p = 1");
  double s = p[n] / (1.0 - p[n]);
  for (std::size_t m = 0; m < net.num_vaps(); ++m)
    if (cfg.channel[m] == cfg.channel[n] && net.graph().interferes(cfg.channel[n], n, m)) s *= 1.0 - p[m];
  return s;
}

// Per-client rates for explicit (phi, p); client scheme ignores phi.
template <class Real>
std::vector<Real> rates_as(const Network& net, const Configuration& cfg, Scheme scheme, std::span<const Real> phi,
                           std::span<const Real> p) {
  std::vector<Real> r(net.num_clients());
  for (std::size_t i = 0; i < net.num_clients(); ++i) {
    const ApIndex n = cfg.association[i];
    const Real b = net.rate(i, n, cfg.channel[n]);
    Real s;
    if (scheme == Scheme::ServerCentric) {
      s = phi[i] * p[n];
      for (std::size_t m = 0; m < net.num_vaps(); ++m)
        if (m != n && cfg.channel[m] == cfg.channel[n] && net.graph().interferes(cfg.channel[n], n, m)) s *= 1 - p[m];
    } else {
      s = p[i];
      for (std::size_t j = 0; j < net.num_clients(); ++j) {
        const ApIndex m = cfg.association[j];
        if (j != i && cfg.channel[m] == cfg.channel[n] && net.graph().interferes(cfg.channel[n], n, m))
          s *= 1 - p[j];
      }
    }
    r[i] = b * s;
  }
  return r;
}

inline std::vector<double> rates(const Network& net, const Configuration& cfg, Scheme scheme,
                                 std::span<const double> phi, std::span<const double> p) {
  return rates_as<double>(net, cfg, scheme, phi, p);
}

template <class Real>
Energy utility_as(const Network& net, std::span<const Real> r) {
  Real u = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0)) return Energy::infeasible();
    u += net.weight(i) * std::log(r[i]);
  }
  return Energy(static_cast<double>(u));
}

inline Energy utility(const Network& net, std::span<const double> r) { return utility_as<double>(net, r); }

// sum_i w_i log r_i with phi = w_i / w^n and p = w^n / z^n (or w_i / z^n),
// evaluated in extended precision.
inline Energy direct_energy(const Network& net, const Configuration& cfg, Scheme scheme) {
  using Real = long double;
  const Loads L = loads(net, cfg);
  std::vector<Real> phi(net.num_clients());
  for (std::size_t i = 0; i < net.num_clients(); ++i)
    phi[i] = static_cast<Real>(net.weight(i)) / L.w[cfg.association[i]];
  std::vector<Real> p;
  if (scheme == Scheme::ServerCentric) {
    p.resize(net.num_vaps());
    for (std::size_t n = 0; n < net.num_vaps(); ++n) p[n] = L.clients[n] ? static_cast<Real>(L.w[n]) / L.z[n] : 0;
  } else {
    p.resize(net.num_clients());
    for (std::size_t i = 0; i < net.num_clients(); ++i)
      p[i] = static_cast<Real>(net.weight(i)) / L.z[cfg.association[i]];
  }
  return utility_as<Real>(net, rates_as<Real>(net, cfg, scheme, phi, p));
}

// Upper bound on the configurations enumerate_* would visit.
inline double enumeration_size(const Network& net) {
  double size = std::pow(static_cast<double>(net.num_channels()), static_cast<double>(net.num_vaps()));
  for (std::size_t i = 0; i < net.num_clients(); ++i) {
    std::size_t reach = 0;
    for (std::size_t n = 0; n < net.num_vaps(); ++n)
      for (std::size_t c = 0; c < net.num_channels(); ++c)
        if (net.rate(i, n, c) > 0.0) {
          ++reach;
          break;
        }
    size *= static_cast<double>(reach);
  }
  return size;
}

struct Evaluated {
  Configuration config;
  Energy energy;
};

// Visits every feasible configuration in lexicographic order (channel map
// first, then association).
template <class F>
void for_each_configuration(const Network& net, F&& visit, double guard = kDefaultGuard) {
  const double size = enumeration_size(net);
  if (size > guard)
  {
    char msg[160];
    std::snprintf(msg, sizeof msg, "enumeration would visit up to %.3g configurations, above the guard of %.3g", size,
                  guard);
    throw SizeGuardError(msg);
  }
  const std::size_t N = net.num_vaps(), I = net.num_clients(), C = net.num_channels();
  Configuration cfg;
  cfg.channel.assign(N, 0);
  cfg.association.assign(I, 0);
  while (true) {
    std::vector<std::vector<ApIndex>> options(I);
    bool ok = true;
    for (std::size_t i = 0; i < I && ok; ++i) {
      for (std::size_t n = 0; n < N; ++n)
        if (net.rate(i, n, cfg.channel[n]) > 0.0) options[i].push_back(n);
      ok = !options[i].empty();
    }
    if (ok) {
      std::vector<std::size_t> pick(I, 0);
      while (true) {
        for (std::size_t i = 0; i < I; ++i) cfg.association[i] = options[i][pick[i]];
        visit(static_cast<const Configuration&>(cfg));
        std::size_t k = I;
        while (k > 0 && ++pick[k - 1] == options[k - 1].size()) pick[--k] = 0;
        if (k == 0) break;
      }
    }
    std::size_t k = N;
    while (k > 0 && ++cfg.channel[k - 1] == C) cfg.channel[--k] = 0;
    if (k == 0) break;
  }
}

inline std::vector<Evaluated> enumerate_all(const Network& net, Scheme scheme, double guard = kDefaultGuard) {
  std::vector<Evaluated> out;
  for_each_configuration(
      net, [&](const Configuration& cfg) { out.push_back({cfg, direct_energy(net, cfg, scheme)}); }, guard);
  return out;
}

struct Optimum {
  Configuration config;
  Energy energy;
  std::uint64_t evaluated = 0;
};

// Global maximum of U; the lexicographically first configuration wins ties.
inline Optimum enumerate_optimum(const Network& net, Scheme scheme, double guard = kDefaultGuard) {
  Optimum best;
  for_each_configuration(
      net,
      [&](const Configuration& cfg) {
        ++best.evaluated;
        const Energy u = direct_energy(net, cfg, scheme);
        if (u && (!best.energy || u.value() > best.energy.value())) {
          best.config = cfg;
          best.energy = u;
        }
      },
      guard);
  return best;
}

struct NumericOptimum {
  std::vector<double> phi;  // per client
  std::vector<double> p;    // per virtual AP
  Energy energy;
};

inline constexpr std::size_t kMaxFreeVariables = 6;

/// Server-centric (phi, p) maximizing sum w log r for a fixed configuration
/// by grid search and compass refinement, without using the closed forms.
///
/// Free variables: k - 1 schedule shares for an AP with k clients (the last
/// share is the remainder) and one access probability per loaded AP.
inline NumericOptimum numeric_phi_p_optimum(const Network& net, const Configuration& cfg) {
  const std::size_t N = net.num_vaps(), I = net.num_clients();
  std::vector<std::vector<ClientIndex>> members(N);
  for (std::size_t i = 0; i < I; ++i) members[cfg.association[i]].push_back(i);

  struct Var {
    bool is_access;
    std::size_t index;  // AP for access, client for schedule
  };
  std::vector<Var> vars;
  for (std::size_t n = 0; n < N; ++n) {
    if (members[n].empty()) continue;
    for (std::size_t k = 0; k + 1 < members[n].size(); ++k) vars.push_back({false, members[n][k]});
    vars.push_back({true, n});
  }
  if (vars.size() > kMaxFreeVariables)
    throw SizeGuardError("numeric optimum supports at most 6 free variables, got " + std::to_string(vars.size()));

  std::vector<double> phi(I, 1.0), p(N, 0.0);
  auto load = [&](const std::vector<double>& x) {
    for (std::size_t k = 0; k < vars.size(); ++k) (vars[k].is_access ? p[vars[k].index] : phi[vars[k].index]) = x[k];
    for (std::size_t n = 0; n < N; ++n) {
      if (members[n].empty()) continue;
      double rest = 1.0;
      for (std::size_t k = 0; k + 1 < members[n].size(); ++k) rest -= phi[members[n][k]];
      phi[members[n].back()] = rest;
    }
  };
  auto objective = [&](const std::vector<double>& x) {
    for (double v : x)
      if (!(v > 0.0 && v < 1.0)) return -std::numeric_limits<double>::infinity();
    load(x);
    for (std::size_t n = 0; n < N; ++n)
      if (!members[n].empty() && !(phi[members[n].back()] > 0.0)) return -std::numeric_limits<double>::infinity();
    return utility(net, rates(net, cfg, Scheme::ServerCentric, phi, p)).value();
  };

  const std::size_t d = vars.size();
  std::vector<double> best_x(d, 0.5);
  double best = -std::numeric_limits<double>::infinity();
  if (d > 0) {
    std::size_t grid = 3;
    while (std::pow(static_cast<double>(grid + 1), static_cast<double>(d)) <= 2e5 && grid < 64) ++grid;
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d);
    while (true) {
      for (std::size_t k = 0; k < d; ++k) x[k] = (static_cast<double>(idx[k]) + 0.5) / static_cast<double>(grid);
      if (const double v = objective(x); v > best) {
        best = v;
        best_x = x;
      }
      std::size_t k = d;
      while (k > 0 && ++idx[k - 1] == grid) idx[--k] = 0;
      if (k == 0) break;
    }
    // Compass search: move along any axis that improves, halve the step otherwise.
    for (double h = 0.5 / static_cast<double>(grid); h > 1e-10; h *= 0.5) {
      bool moved = true;
      while (moved) {
        moved = false;
        for (std::size_t k = 0; k < d; ++k)
          for (double sign : {1.0, -1.0}) {
            auto y = best_x;
            y[k] += sign * h;
            if (const double v = objective(y); v > best) {
              best = v;
              best_x = std::move(y);
              moved = true;
            }
          }
      }
    }
  }
  NumericOptimum out;
  if (d > 0) {
    objective(best_x);
  }
  out.phi = phi;
  out.p = p;
  out.energy = utility(net, rates(net, cfg, Scheme::ServerCentric, phi, p));
  return out;
}

}  // namespace mbpf::oracle
