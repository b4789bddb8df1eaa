#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbpf/types.hpp"

namespace mbpf {

struct RateTier {
  double rate_mbps = 0.0;
  double range_m = 0.0;

  friend bool operator==(const RateTier&, const RateTier&) = default;
};

/// Path-loss model: received power is proportional to 1 / (f^2 d^alpha).
///
/// Every channel is described relative to a base channel (802.11b by
/// default). Rates scale with bandwidth; ranges are stretched so that the
/// received power at each range boundary matches the base channel.
struct RadioModel {
  double path_loss_alpha = 3.5;
  double base_frequency_mhz = 2400.0;
  double base_bandwidth_mhz = 22.0;
  std::vector<RateTier> base_tiers{{11.0, 50.0}, {5.5, 80.0}, {2.0, 120.0}, {1.0, 150.0}};
  // Carrier sense threshold, as a power ratio below the power received at
  // the maximum transmission range.
  double carrier_sense_factor = 23.42;
  // Round the base-channel interference range to whole meters (369 m for
  // 802.11b) before scaling it to other channels.
  bool round_interference_range = true;

  friend bool operator==(const RadioModel&, const RadioModel&) = default;

  void validate() const {
    if (!(path_loss_alpha > 2.0)) throw std::invalid_argument("radio: path_loss_alpha must exceed 2");
    if (!(base_frequency_mhz > 0.0) || !(base_bandwidth_mhz > 0.0))
      throw std::invalid_argument("radio: base frequency and bandwidth must be positive");
    if (!(carrier_sense_factor > 1.0)) throw std::invalid_argument("radio: carrier_sense_factor must exceed 1");
    if (base_tiers.empty()) throw std::invalid_argument("radio: at least one rate tier is required");
    for (std::size_t k = 0; k < base_tiers.size(); ++k) {
      if (!(base_tiers[k].rate_mbps > 0.0) || !(base_tiers[k].range_m > 0.0))
        throw std::invalid_argument("radio: tier rates and ranges must be positive");
      if (k > 0 && !(base_tiers[k].rate_mbps < base_tiers[k - 1].rate_mbps &&
                     base_tiers[k].range_m > base_tiers[k - 1].range_m))
        throw std::invalid_argument("radio: tiers must be decreasing in rate and increasing in range");
    }
  }

  double max_base_range() const { return base_tiers.back().range_m; }

  // Distance at which received power drops to the carrier sense threshold
  // on the base channel.
  double carrier_sense_range() const {
    return max_base_range() * std::pow(carrier_sense_factor, 1.0 / path_loss_alpha);
  }

  double base_interference_range() const {
    return round_interference_range ? std::round(carrier_sense_range()) : carrier_sense_range();
  }
};

inline void validate(const Channel& c) {
  if (!(c.center_mhz > 0.0) || !(c.bandwidth_mhz > 0.0))
    throw std::invalid_argument("channel '" + c.id + "': frequency and bandwidth must be positive");
}

// Factor by which all ranges shrink (or grow) relative to the base channel.
inline double range_scale(const Channel& channel, const RadioModel& model) {
  validate(channel);
  return std::pow(model.base_frequency_mhz / channel.center_mhz, 2.0 / model.path_loss_alpha);
}

struct ChannelProfile {
  std::string channel_id;
  std::vector<RateTier> tiers;  // innermost (fastest) first
  double interference_range_m = 0.0;

  double max_range() const { return tiers.empty() ? 0.0 : tiers.back().range_m; }
};

inline ChannelProfile channel_profile(const Channel& channel, const RadioModel& model) {
  const double scale = range_scale(channel, model);
  const double rate_factor = channel.bandwidth_mhz / model.base_bandwidth_mhz;
  ChannelProfile profile;
  profile.channel_id = channel.id;
  profile.tiers.reserve(model.base_tiers.size());
  for (const auto& t : model.base_tiers) profile.tiers.push_back({t.rate_mbps * rate_factor, t.range_m * scale});
  profile.interference_range_m = model.base_interference_range() * scale;
  return profile;
}

// Rate of the innermost tier covering the distance; boundaries are inclusive.
inline double link_rate(double distance_m, const ChannelProfile& profile) noexcept {
  for (const auto& t : profile.tiers)
    if (distance_m <= t.range_m) return t.rate_mbps;
  return 0.0;
}

inline double link_rate(const Point& client, const Point& ap, const ChannelProfile& profile) noexcept {
  return link_rate(distance(client, ap), profile);
}

}  // namespace mbpf
