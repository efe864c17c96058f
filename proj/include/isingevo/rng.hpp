#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>

namespace isingevo {

/// SplitMix64 output function. Bijective, so distinct inputs give distinct
/// outputs.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Thin wrapper over mt19937_64 with the handful of draws the simulator needs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  double normal() { return normal_(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal_(engine_); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Random sign, +1 or -1 with equal probability.
  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      using std::swap;
      swap(first[i - 1], first[index(i)]);
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Hierarchical seed derivation. A node is a 64-bit state; child(k) hashes the
/// parent state together with the key. Streams for (replicate, generation,
/// agent, ...) are obtained by walking a fixed path from the root, so the
/// values never depend on the order in which work is scheduled.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t root) : state_(mix64(root)) {}

  [[nodiscard]] SeedTree child(std::uint64_t key) const {
    return SeedTree(Raw{}, mix64(state_ ^ mix64(key ^ 0x632be59bd9b4e019ULL)));
  }
  template <class... Keys>
  [[nodiscard]] SeedTree path(std::uint64_t first, Keys... rest) const {
    if constexpr (sizeof...(rest) == 0) {
      return child(first);
    } else {
      return child(first).path(static_cast<std::uint64_t>(rest)...);
    }
  }

  [[nodiscard]] Rng rng() const { return Rng(state_); }
  [[nodiscard]] std::uint64_t value() const { return state_; }

 private:
  struct Raw {};
  SeedTree(Raw, std::uint64_t state) : state_(state) {}
  std::uint64_t state_;
};

/// Fixed first-level keys of the seed tree.
namespace stream {
inline constexpr std::uint64_t kWorld = 1;
inline constexpr std::uint64_t kAgent = 2;
inline constexpr std::uint64_t kEvolution = 3;
inline constexpr std::uint64_t kCriticality = 4;
inline constexpr std::uint64_t kInit = 5;
inline constexpr std::uint64_t kLifetime = 6;
inline constexpr std::uint64_t kPerturb = 7;
inline constexpr std::uint64_t kBenchmark = 8;
inline constexpr std::uint64_t kReplicate = 9;
}  // namespace stream

}  // namespace isingevo
