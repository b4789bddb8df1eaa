#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mbpf/annealing.hpp"
#include "mbpf/fairness.hpp"
#include "mbpf/model.hpp"
#include "mbpf/rng.hpp"

namespace mbpf {

// Number of unordered virtual-AP pairs on the same channel within
// interference range of each other.
inline std::size_t interfering_pairs(const Network& net, std::span<const ChannelIndex> channel_map) {
  std::size_t pairs = 0;
  for (std::size_t n = 0; n < net.num_vaps(); ++n)
    for (ApIndex m : net.graph().neighbors(channel_map[n], n))
      if (m > n && channel_map[m] == channel_map[n]) ++pairs;
  return pairs;
}

namespace detail {

inline std::size_t pairs_at(const Network& net, std::span<const ChannelIndex> channel_map, ApIndex n, ChannelIndex c) {
  std::size_t k = 0;
  for (ApIndex m : net.graph().neighbors(c, n))
    if (m != n && channel_map[m] == c) ++k;
  return k;
}

}  // namespace detail

struct MinIntResult {
  std::vector<ChannelIndex> channels;
  std::size_t interfering_pairs = 0;
  std::vector<std::size_t> objective_trace;  // pair count after each improving move of the winning descent
};

// Single-AP channel moves, round robin, each AP taking the channel with the
// fewest same-channel interferers, until a sweep changes nothing.
inline MinIntResult minint_descent(const Network& net, std::vector<ChannelIndex> channels) {
  MinIntResult res;
  res.interfering_pairs = interfering_pairs(net, channels);
  res.objective_trace.push_back(res.interfering_pairs);
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t n = 0; n < net.num_vaps(); ++n) {
      const ChannelIndex cur = channels[n];
      ChannelIndex best = cur;
      std::size_t best_pairs = detail::pairs_at(net, channels, n, cur);
      for (std::size_t c = 0; c < net.num_channels(); ++c) {
        const std::size_t k = detail::pairs_at(net, channels, n, c);
        if (k < best_pairs) {
          best = c;
          best_pairs = k;
        }
      }
      if (best != cur) {
        res.interfering_pairs -= detail::pairs_at(net, channels, n, cur) - best_pairs;
        channels[n] = best;
        res.objective_trace.push_back(res.interfering_pairs);
        improved = true;
      }
    }
  }
  res.channels = std::move(channels);
  return res;
}

/// Stand-in for distributed minimum-interference channel selection: local
/// descent on the interfering-pair count from `start` and from `restarts - 1`
/// further random channel maps; the lowest count wins, earliest on ties.
inline MinIntResult minint_channel_selection(const Network& net, std::vector<ChannelIndex> start,
                                             std::size_t restarts, Rng& rng) {
  if (start.size() != net.num_vaps()) throw std::invalid_argument("channel map size mismatch");
  MinIntResult best = minint_descent(net, std::move(start));
  for (std::size_t r = 1; r < restarts && best.interfering_pairs > 0; ++r) {
    std::vector<ChannelIndex> map(net.num_vaps());
    for (auto& c : map) c = static_cast<ChannelIndex>(rng.index(net.num_channels()));
    auto cand = minint_descent(net, std::move(map));
    if (cand.interfering_pairs < best.interfering_pairs) best = std::move(cand);
  }
  return best;
}

inline MinIntResult minint_channel_selection(const Network& net, std::size_t restarts, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ChannelIndex> start(net.num_vaps());
  for (auto& c : start) c = static_cast<ChannelIndex>(rng.index(net.num_channels()));
  return minint_channel_selection(net, std::move(start), restarts, rng);
}

struct WifiAssignment {
  Configuration config;
  Allocation allocation;
};

/// Wifi-like association and scheduling on a fixed channel map: each client
/// joins the nearest radio it can reach (lowest index on ties), and each AP
/// serves client i with probability proportional to 1 / B_i so all of its
/// clients get equal throughput. Access probabilities are w^n / z^n.
inline WifiAssignment wifi_association_and_schedule(const Network& net, std::vector<ChannelIndex> channel_map) {
  if (channel_map.size() != net.num_vaps()) throw std::invalid_argument("channel map size mismatch");
  WifiAssignment out;
  out.config.channel = std::move(channel_map);
  out.config.association.assign(net.num_clients(), 0);
  for (std::size_t i = 0; i < net.num_clients(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t n = 0; n < net.num_vaps(); ++n) {
      if (!(net.rate(i, n, out.config.channel[n]) > 0.0)) continue;
      const double d = distance(net.clients()[i].position, net.vaps()[n].position);
      if (d < best) {
        best = d;
        out.config.association[i] = n;
        found = true;
      }
    }
    if (!found)
      throw ScenarioError("client '" + net.clients()[i].id + "' cannot reach any access point on this channel map");
  }
  const auto agg = compute_aggregates(net, out.config);
  std::vector<double> inv_sum(net.num_vaps(), 0.0);
  for (std::size_t i = 0; i < net.num_clients(); ++i) inv_sum[out.config.association[i]] += 1.0 / net.rate(out.config, i);
  out.allocation.scheme = Scheme::ServerCentric;
  out.allocation.schedule.resize(net.num_clients());
  for (std::size_t i = 0; i < net.num_clients(); ++i)
    out.allocation.schedule[i] = (1.0 / net.rate(out.config, i)) / inv_sum[out.config.association[i]];
  out.allocation.access = optimal_access(net, out.config, agg, Scheme::ServerCentric);
  return out;
}

inline constexpr std::size_t kDefaultMinIntRestarts = 32;

/// MinInt-Wifi baseline from the usual random start: the random channel map
/// seeds the first MinInt descent.
inline RunResult run_minint_wifi(const Network& net, std::uint64_t seed,
                                 std::size_t restarts = kDefaultMinIntRestarts,
                                 std::span<const std::optional<ChannelIndex>> pinned = {}) {
  Rng rng(seed);
  Rng init_rng = rng.split(0);
  Rng search_rng = rng.split(2);
  Configuration start = initial_configuration(net, init_rng, pinned);
  auto minint = minint_channel_selection(net, start.channel, restarts, search_rng);
  auto wifi = wifi_association_and_schedule(net, minint.channels);

  RunResult res;
  res.policy = "minint-wifi";
  res.scheme = Scheme::ServerCentric;
  res.seed = seed;
  res.initial = std::move(start);
  res.final_config = wifi.config;
  res.allocation = wifi.allocation;
  res.report = throughput(net, wifi.config, wifi.allocation);
  res.energy = res.report.energy;
  res.converged = true;
  res.trajectory.push_back({0, 0.0, res.energy, res.report.weighted_throughput, config_hash(res.final_config)});
  return res;
}

}  // namespace mbpf
