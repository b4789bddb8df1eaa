#pragma once

#include <cstdint>
#include <random>

namespace mbpf {

// SplitMix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seedable random stream with platform-independent draws.
//
// std::mt19937_64 output is fixed by the standard but the <random>
// distributions are not, so the conversions to reals and indices are done
// here by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  // Child stream; depends only on (seed, key), not on how many draws were made.
  Rng split(std::uint64_t key) const { return Rng(splitmix64(seed_ ^ splitmix64(key + 1))); }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on [0, 1], both ends reachable.
  double uniform_closed() {
    return static_cast<double>(engine_() >> 11) / static_cast<double>((1ULL << 53) - 1);
  }

  // Uniform on [lo, hi], both ends reachable.
  double uniform_closed(double lo, double hi) { return lo + (hi - lo) * uniform_closed(); }

  // Uniform integer in [0, n); n must be positive. Rejection sampling, no modulo bias.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace mbpf
