#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

using namespace mbpf;

TEST(Oracle, SingleConfiguration) {
  const Network net(std::vector<Channel>{builtin::ieee80211b()}, std::vector<AccessPoint>{{"a", {0, 0}, 1}},
                    std::vector<Client>{{"c", {60, 0}, 2.0}}, RadioModel{});
  const auto opt = oracle::enumerate_optimum(net, Scheme::ServerCentric);
  EXPECT_EQ(opt.evaluated, 1u);
  EXPECT_DOUBLE_EQ(opt.energy.value(), 2.0 * std::log(5.5));
}

TEST(Oracle, MicroInstance) {
  const Network net = to_network(builtin::micro());
  EXPECT_LE(oracle::enumeration_size(net), 32.0);
  const auto all = oracle::enumerate_all(net, Scheme::ServerCentric);
  EXPECT_LE(all.size(), 32u);
  std::set<std::uint64_t> seen;
  for (const auto& e : all) {
    EXPECT_TRUE(is_feasible(net, e.config));
    EXPECT_TRUE(seen.insert(config_hash(e.config)).second);
  }
  const auto opt = oracle::enumerate_optimum(net, Scheme::ServerCentric);
  for (const auto& e : all) EXPECT_LE(e.energy.value(), opt.energy.value());
  EXPECT_EQ(opt.evaluated, all.size());
}

TEST(Oracle, LineRestrictedToFourClients) {
  auto s = builtin::line3(builtin::Line3Variant::OneChannel);
  s.clients.clear();
  for (int k = 0; k < 4; ++k) s.clients.push_back({"c" + std::to_string(k), {60.0 + 5.0 * k, 0.0}, 1.0});
  const Network net = to_network(s);
  const auto opt = oracle::enumerate_optimum(net, Scheme::ServerCentric);
  for (auto a : opt.config.association) EXPECT_EQ(a, 1u);
}

TEST(Oracle, GuardRefusesLargeScenarios) {
  const Network net = to_network(builtin::grid16(builtin::Weighting::Unweighted, 1));
  EXPECT_THROW(oracle::enumerate_optimum(net, Scheme::ServerCentric), oracle::SizeGuardError);
}

TEST(Oracle, NumericOptimumAgreesWithClosedForm) {
  Rng rng(47);
  support::InstanceShape shape;
  shape.max_aps = 2;
  shape.max_clients = 3;
  for (int rep = 0; rep < 10; ++rep) {
    const Network net = to_network(support::random_scenario(rng, shape));
    const auto cfg = support::random_configuration(net, rng);
    const auto num = oracle::numeric_phi_p_optimum(net, cfg);
    const double closed = energy(net, cfg, Scheme::ServerCentric).value();
    EXPECT_GE(closed, num.energy.value() - 1e-3);
    EXPECT_LE(num.energy.value(), closed + 1e-9);
  }
}

TEST(Oracle, DirectEnergyHandlesClientlessAps) {
  const Network net = to_network(builtin::micro());
  const Configuration cfg{{0, 0, 0}, {0, 0}};
  EXPECT_NEAR(oracle::direct_energy(net, cfg, Scheme::ServerCentric).value(),
              energy(net, cfg, Scheme::ServerCentric).value(), 1e-12);
}
