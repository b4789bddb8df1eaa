#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace mbpf;

namespace {

const RadioModel kRadio{};

Channel ch(double f, double bw) { return {"x", f, bw}; }

}  // namespace

TEST(Radio, ScaleIsIdentityOnBaseChannel) {
  EXPECT_EQ(range_scale(builtin::ieee80211b(), kRadio), 1.0);
  const auto p = channel_profile(builtin::ieee80211b(), kRadio);
  EXPECT_EQ(p.tiers, kRadio.base_tiers);
  EXPECT_EQ(p.interference_range_m, 369.0);
}

TEST(Radio, FourGigahertzChannel) {
  EXPECT_NEAR(range_scale(ch(4000, 44), kRadio), 0.746842950, 1e-9);
  const auto p = channel_profile(ch(4000, 44), kRadio);
  const double ranges[] = {37.342, 59.747, 89.621, 112.026};
  const double rates[] = {22, 11, 4, 2};
  ASSERT_EQ(p.tiers.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(p.tiers[k].range_m, ranges[k], 1e-3);
    EXPECT_DOUBLE_EQ(p.tiers[k].rate_mbps, rates[k]);
  }
  EXPECT_NEAR(p.interference_range_m, 275.59, 0.01);
}

TEST(Radio, WhiteSpaceChannelA) {
  EXPECT_NEAR(range_scale(ch(524, 12), kRadio), 2.385864023, 1e-9);
  const auto p = channel_profile(ch(524, 12), kRadio);
  EXPECT_NEAR(p.tiers[0].range_m, 119.293, 1e-3);
  EXPECT_DOUBLE_EQ(p.tiers[0].rate_mbps, 6.0);
  EXPECT_DOUBLE_EQ(p.tiers[1].rate_mbps, 3.0);
  EXPECT_DOUBLE_EQ(p.tiers[2].rate_mbps, 12.0 / 11.0);
  EXPECT_DOUBLE_EQ(p.tiers[3].rate_mbps, 6.0 / 11.0);
  EXPECT_NEAR(range_scale(ch(683, 6), kRadio), 2.050596952, 1e-9);
}

TEST(Radio, SixteenGigahertzChannel) {
  EXPECT_NEAR(range_scale(builtin::band16ghz(), kRadio), 0.338216667, 1e-9);
  const auto p = channel_profile(builtin::band16ghz(), kRadio);
  EXPECT_NEAR(p.interference_range_m, 124.80, 0.01);
}

TEST(Radio, InterferenceRangeRounding) {
  EXPECT_NEAR(kRadio.carrier_sense_range(), 369.319, 1e-3);
  RadioModel exact = kRadio;
  exact.round_interference_range = false;
  EXPECT_NEAR(exact.base_interference_range(), 369.319, 1e-3);
  EXPECT_EQ(kRadio.base_interference_range(), 369.0);
}

TEST(Radio, TierBoundariesInclusive) {
  const auto p = channel_profile(builtin::ieee80211b(), kRadio);
  EXPECT_EQ(link_rate(0.0, p), 11.0);
  EXPECT_EQ(link_rate(50.0, p), 11.0);
  EXPECT_EQ(link_rate(50.01, p), 5.5);
  EXPECT_EQ(link_rate(150.0, p), 1.0);
  EXPECT_EQ(link_rate(150.01, p), 0.0);
  EXPECT_EQ(link_rate(Point{0, 0}, Point{30, 40}, p), 11.0);
}

TEST(Radio, LinkRateNonIncreasingInDistance) {
  for (const auto& c : builtin::nyc_white_spaces()) {
    const auto p = channel_profile(c, kRadio);
    double prev = link_rate(0.0, p);
    for (double d = 0.0; d < 600.0; d += 0.37) {
      const double r = link_rate(d, p);
      EXPECT_LE(r, prev);
      prev = r;
    }
  }
}

TEST(Radio, DoublingBandwidthDoublesRates) {
  const auto a = channel_profile(ch(5000, 20), kRadio);
  const auto b = channel_profile(ch(5000, 40), kRadio);
  for (std::size_t k = 0; k < a.tiers.size(); ++k) {
    EXPECT_EQ(b.tiers[k].rate_mbps, 2.0 * a.tiers[k].rate_mbps);
    EXPECT_EQ(b.tiers[k].range_m, a.tiers[k].range_m);
  }
  EXPECT_EQ(a.interference_range_m, b.interference_range_m);
}

TEST(Radio, ReceivedPowerMatchesAtTierBoundaries) {
  const double alpha = kRadio.path_loss_alpha;
  for (double f : {524.0, 683.0, 2400.0, 4000.0, 16000.0}) {
    const auto p = channel_profile(ch(f, 10), kRadio);
    for (std::size_t k = 0; k < p.tiers.size(); ++k) {
      const double base = 1.0 / (2400.0 * 2400.0 * std::pow(kRadio.base_tiers[k].range_m, alpha));
      const double here = 1.0 / (f * f * std::pow(p.tiers[k].range_m, alpha));
      EXPECT_LT(support::relative_error(here / base, 1.0), 1e-9) << f << " tier " << k;
    }
  }
}

TEST(Radio, ValidationRejectsBadInput) {
  EXPECT_THROW(range_scale(ch(0, 10), kRadio), std::invalid_argument);
  EXPECT_THROW(range_scale(ch(2400, -1), kRadio), std::invalid_argument);
  RadioModel bad = kRadio;
  bad.base_tiers = {{11, 80}, {5.5, 50}};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = kRadio;
  bad.path_loss_alpha = 2.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}
