#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mbpf/radio.hpp"
#include "mbpf/types.hpp"

namespace mbpf {

using ClientIndex = std::size_t;
using ApIndex = std::size_t;
using ChannelIndex = std::size_t;

// One radio of a physical AP, modeled as an independent single-radio AP at
// the parent's position.
struct VirtualAP {
  std::string id;
  std::size_t parent = 0;  // index into the physical AP list
  int radio = 0;
  Point position;
};

// Parent order, then radio index. Single-radio APs keep their id.
inline std::vector<VirtualAP> expand_virtual_aps(std::span<const AccessPoint> aps) {
  std::vector<VirtualAP> out;
  for (std::size_t a = 0; a < aps.size(); ++a) {
    if (aps[a].radio_count < 1) throw ScenarioError("ap '" + aps[a].id + "': radio_count must be at least 1");
    for (int r = 0; r < aps[a].radio_count; ++r) {
      std::string id = aps[a].radio_count == 1 ? aps[a].id : aps[a].id + "#" + std::to_string(r);
      out.push_back({std::move(id), a, r, aps[a].position});
    }
  }
  return out;
}

/// Channel-dependent protocol interference structure.
///
/// neighbors(c, n) is M^{n,c}: every virtual AP within the interference
/// range of channel c from n, n itself included, in ascending index order.
class InterferenceGraph {
 public:
  InterferenceGraph() = default;
  InterferenceGraph(std::size_t channels, std::size_t aps)
      : channels_(channels), aps_(aps), adjacency_(channels * aps * aps, 0), neighbors_(channels * aps) {}

  std::size_t num_channels() const noexcept { return channels_; }
  std::size_t num_aps() const noexcept { return aps_; }

  bool interferes(ChannelIndex c, ApIndex m, ApIndex n) const noexcept {
    return adjacency_[(c * aps_ + m) * aps_ + n] != 0;
  }

  const std::vector<ApIndex>& neighbors(ChannelIndex c, ApIndex n) const noexcept {
    return neighbors_[c * aps_ + n];
  }

  void connect(ChannelIndex c, ApIndex m, ApIndex n) {
    adjacency_[(c * aps_ + m) * aps_ + n] = 1;
    adjacency_[(c * aps_ + n) * aps_ + m] = 1;
  }

  // Rebuilds the sorted neighbor lists from the adjacency matrix.
  void finalize() {
    for (std::size_t c = 0; c < channels_; ++c)
      for (std::size_t n = 0; n < aps_; ++n) {
        auto& list = neighbors_[c * aps_ + n];
        list.clear();
        for (std::size_t m = 0; m < aps_; ++m)
          if (interferes(c, n, m)) list.push_back(m);
      }
  }

 private:
  std::size_t channels_ = 0;
  std::size_t aps_ = 0;
  std::vector<unsigned char> adjacency_;
  std::vector<std::vector<ApIndex>> neighbors_;
};

inline InterferenceGraph build_interference_graph(std::span<const VirtualAP> vaps,
                                                  std::span<const ChannelProfile> profiles) {
  InterferenceGraph g(profiles.size(), vaps.size());
  for (std::size_t c = 0; c < profiles.size(); ++c) {
    const double range = profiles[c].interference_range_m;
    for (std::size_t n = 0; n < vaps.size(); ++n) {
      g.connect(c, n, n);
      for (std::size_t m = n + 1; m < vaps.size(); ++m)
        if (distance(vaps[n].position, vaps[m].position) <= range) g.connect(c, n, m);
    }
  }
  g.finalize();
  return g;
}

inline InterferenceGraph build_interference_graph(std::span<const VirtualAP> vaps, std::span<const Channel> channels,
                                                  const RadioModel& radio) {
  radio.validate();
  std::vector<ChannelProfile> profiles;
  for (const auto& c : channels) profiles.push_back(channel_profile(c, radio));
  return build_interference_graph(vaps, profiles);
}

// Joint solution of client association and channel selection, by index into
// the owning Network's client, virtual AP, and channel lists.
struct Configuration {
  std::vector<ApIndex> association;   // client -> virtual AP
  std::vector<ChannelIndex> channel;  // virtual AP -> channel

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

inline std::uint64_t config_hash(const Configuration& cfg) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(cfg.association.size());
  for (auto a : cfg.association) mix(a);
  mix(cfg.channel.size());
  for (auto c : cfg.channel) mix(c);
  return h;
}

/// Immutable problem instance: channels with their profiles, virtual APs,
/// clients, the interference graph, and the precomputed rate table
/// B[i][n][c].
class Network {
 public:
  Network(std::vector<Channel> channels, std::vector<AccessPoint> aps, std::vector<Client> clients,
          RadioModel radio = {})
      : radio_(std::move(radio)), channels_(std::move(channels)), aps_(std::move(aps)), clients_(std::move(clients)) {
    radio_.validate();
    if (channels_.empty()) throw ScenarioError("scenario has no channels");
    if (aps_.empty()) throw ScenarioError("scenario has no access points");
    check_unique(channels_, "channel");
    check_unique(aps_, "ap");
    check_unique(clients_, "client");
    for (const auto& c : channels_) {
      if (!(c.center_mhz > 0.0) || !(c.bandwidth_mhz > 0.0))
        throw ScenarioError("channel '" + c.id + "': frequency and bandwidth must be positive");
      profiles_.push_back(channel_profile(c, radio_));
    }
    for (const auto& cl : clients_)
      if (!(cl.weight > 0.0) || !std::isfinite(cl.weight)) throw ScenarioError("client '" + cl.id + "': weight must be positive");
    vaps_ = expand_virtual_aps(aps_);
    graph_ = build_interference_graph(vaps_, profiles_);
    weights_.reserve(clients_.size());
    for (const auto& cl : clients_) weights_.push_back(cl.weight);
    rates_.resize(clients_.size() * vaps_.size() * channels_.size());
    for (std::size_t i = 0; i < clients_.size(); ++i)
      for (std::size_t n = 0; n < vaps_.size(); ++n) {
        const double d = distance(clients_[i].position, vaps_[n].position);
        for (std::size_t c = 0; c < channels_.size(); ++c) rates_[index(i, n, c)] = link_rate(d, profiles_[c]);
      }
  }

  const RadioModel& radio() const noexcept { return radio_; }
  std::span<const Channel> channels() const noexcept { return channels_; }
  std::span<const ChannelProfile> profiles() const noexcept { return profiles_; }
  std::span<const AccessPoint> aps() const noexcept { return aps_; }
  std::span<const VirtualAP> vaps() const noexcept { return vaps_; }
  std::span<const Client> clients() const noexcept { return clients_; }
  std::span<const double> weights() const noexcept { return weights_; }
  const InterferenceGraph& graph() const noexcept { return graph_; }

  std::size_t num_clients() const noexcept { return clients_.size(); }
  std::size_t num_vaps() const noexcept { return vaps_.size(); }
  std::size_t num_channels() const noexcept { return channels_.size(); }

  double weight(ClientIndex i) const noexcept { return weights_[i]; }
  double rate(ClientIndex i, ApIndex n, ChannelIndex c) const noexcept { return rates_[index(i, n, c)]; }

  // Rate client i gets from its AP under the given configuration.
  double rate(const Configuration& cfg, ClientIndex i) const noexcept {
    const ApIndex n = cfg.association[i];
    return rate(i, n, cfg.channel[n]);
  }

  // Whether client i can reach some virtual AP on some channel.
  bool reachable(ClientIndex i) const noexcept {
    for (std::size_t n = 0; n < vaps_.size(); ++n)
      for (std::size_t c = 0; c < channels_.size(); ++c)
        if (rate(i, n, c) > 0.0) return true;
    return false;
  }

 private:
  std::size_t index(ClientIndex i, ApIndex n, ChannelIndex c) const noexcept {
    return (i * vaps_.size() + n) * channels_.size() + c;
  }

  template <class T>
  static void check_unique(const std::vector<T>& items, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& it : items) {
      if (it.id.empty()) throw ScenarioError(std::string(what) + " with empty id");
      if (!seen.insert(it.id).second) throw ScenarioError(std::string("duplicate ") + what + " id '" + it.id + "'");
    }
  }

  RadioModel radio_;
  std::vector<Channel> channels_;
  std::vector<ChannelProfile> profiles_;
  std::vector<AccessPoint> aps_;
  std::vector<VirtualAP> vaps_;
  std::vector<Client> clients_;
  std::vector<double> weights_;
  InterferenceGraph graph_;
  std::vector<double> rates_;
};

// N_i: virtual APs that give client i a nonzero rate on their current channel.
inline std::vector<ApIndex> feasible_aps(const Network& net, std::span<const ChannelIndex> channel_map, ClientIndex i) {
  std::vector<ApIndex> out;
  for (std::size_t n = 0; n < net.num_vaps(); ++n)
    if (net.rate(i, n, channel_map[n]) > 0.0) out.push_back(n);
  return out;
}

// M_i: every AP that could interfere with some AP in N_i on some channel.
inline std::vector<ApIndex> client_neighborhood(const Network& net, std::span<const ChannelIndex> channel_map,
                                                ClientIndex i) {
  std::set<ApIndex> out;
  for (ApIndex n : feasible_aps(net, channel_map, i))
    for (std::size_t c = 0; c < net.num_channels(); ++c)
      for (ApIndex m : net.graph().neighbors(c, n)) out.insert(m);
  return {out.begin(), out.end()};
}

inline bool is_well_formed(const Network& net, const Configuration& cfg) noexcept {
  if (cfg.association.size() != net.num_clients() || cfg.channel.size() != net.num_vaps()) return false;
  for (auto n : cfg.association)
    if (n >= net.num_vaps()) return false;
  for (auto c : cfg.channel)
    if (c >= net.num_channels()) return false;
  return true;
}

// Every client has a nonzero rate to its AP.
inline bool is_feasible(const Network& net, const Configuration& cfg) noexcept {
  if (!is_well_formed(net, cfg)) return false;
  for (std::size_t i = 0; i < net.num_clients(); ++i)
    if (!(net.rate(cfg, i) > 0.0)) return false;
  return true;
}

// Whether m is a same-channel interferer of n (n itself included).
inline bool same_channel_interferer(const Network& net, const Configuration& cfg, ApIndex n, ApIndex m) noexcept {
  return cfg.channel[m] == cfg.channel[n] && net.graph().interferes(cfg.channel[n], n, m);
}

/// Per-AP load sums. w[n] is the total weight of n's clients; z[n] sums w
/// over n's same-channel interference neighborhood, n included.
struct WeightAggregates {
  std::vector<double> w;
  std::vector<double> z;
  std::vector<std::size_t> count;  // clients per AP

  friend bool operator==(const WeightAggregates&, const WeightAggregates&) = default;
};

// z for a single AP from the current w values, summed in ascending AP order.
inline double neighborhood_load(const Network& net, const Configuration& cfg, std::span<const double> w, ApIndex n) {
  double z = 0.0;
  const ChannelIndex c = cfg.channel[n];
  for (ApIndex m : net.graph().neighbors(c, n))
    if (cfg.channel[m] == c) z += w[m];
  return z;
}

// Sums run in ascending client / AP order so incremental refreshes that use
// the same order reproduce these values bit for bit.
inline WeightAggregates compute_aggregates(const Network& net, const Configuration& cfg) {
  WeightAggregates agg;
  agg.w.assign(net.num_vaps(), 0.0);
  agg.z.assign(net.num_vaps(), 0.0);
  agg.count.assign(net.num_vaps(), 0);
  for (std::size_t i = 0; i < net.num_clients(); ++i) {
    agg.w[cfg.association[i]] += net.weight(i);
    ++agg.count[cfg.association[i]];
  }
  for (std::size_t n = 0; n < net.num_vaps(); ++n) agg.z[n] = neighborhood_load(net, cfg, agg.w, n);
  return agg;
}

// Leave-one-out loads. Each is re-summed in the same ascending order as
// compute_aggregates, so it equals the aggregate of the reduced
// configuration bit for bit (a subtraction would not).

// w^n_{-i}: AP n's load with client i removed.
inline double load_without_client(const Network& net, const Configuration& cfg, const WeightAggregates& agg,
                                  ApIndex n, ClientIndex i) {
  if (cfg.association[i] != n) return agg.w[n];
  double w = 0.0;
  for (std::size_t j = 0; j < net.num_clients(); ++j)
    if (j != i && cfg.association[j] == n) w += net.weight(j);
  return w;
}

// z^n_{-i}: n's neighborhood load with client i removed.
inline double neighborhood_load_without_client(const Network& net, const Configuration& cfg,
                                               const WeightAggregates& agg, ApIndex n, ClientIndex i) {
  if (!same_channel_interferer(net, cfg, n, cfg.association[i])) return agg.z[n];
  const ChannelIndex c = cfg.channel[n];
  double z = 0.0;
  for (ApIndex m : net.graph().neighbors(c, n))
    if (cfg.channel[m] == c) z += load_without_client(net, cfg, agg, m, i);
  return z;
}

// z^m_{-n}: m's neighborhood load with all of AP n's load removed (m != n).
inline double neighborhood_load_without_ap(const Network& net, const Configuration& cfg, const WeightAggregates& agg,
                                           ApIndex m, ApIndex n) {
  if (m == n || !same_channel_interferer(net, cfg, m, n)) return agg.z[m];
  const ChannelIndex c = cfg.channel[m];
  double z = 0.0;
  for (ApIndex k : net.graph().neighbors(c, m))
    if (k != n && cfg.channel[k] == c) z += agg.w[k];
  return z;
}

}  // namespace mbpf
