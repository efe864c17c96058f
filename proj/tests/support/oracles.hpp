#pragma once

// Independent reference computations used by the unit and acceptance tests.
// These are deliberately naive and share no code with the library beyond
// its data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "isingevo/ising.hpp"
#include "isingevo/world.hpp"

namespace oracle {

/// -sum over ordered pairs of A_ij J_ij s_i s_j, read straight off the
/// genome fields.
inline double energy(const isingevo::IsingGenome& g, std::span<const double> s) {
  const std::size_t n = g.topology.size();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (g.adjacency[i * n + j]) e -= g.weights[i * n + j] * s[i] * s[j];
    }
  }
  return e;
}

/// Exact distribution over the free spins of a network, with the remaining
/// entries of `clamped` held fixed. State index bit k is free spin k
/// (1 means +1).
struct Enumeration {
  std::vector<std::size_t> free;
  std::vector<double> energies;
  std::vector<double> probabilities;
  double mean = 0.0;
  double variance = 0.0;
};

inline std::vector<double> decode(const std::vector<double>& clamped,
                                  const std::vector<std::size_t>& free, std::size_t state) {
  std::vector<double> s = clamped;
  for (std::size_t k = 0; k < free.size(); ++k) s[free[k]] = (state >> k) & 1U ? 1.0 : -1.0;
  return s;
}

inline Enumeration enumerate(const isingevo::IsingGenome& g, const std::vector<double>& clamped,
                             const std::vector<std::size_t>& free, double beta) {
  Enumeration out;
  out.free = free;
  const std::size_t states = std::size_t{1} << free.size();
  out.energies.resize(states);
  for (std::size_t st = 0; st < states; ++st) out.energies[st] = energy(g, decode(clamped, free, st));
  const double emin = *std::min_element(out.energies.begin(), out.energies.end());
  out.probabilities.resize(states);
  double z = 0.0;
  for (std::size_t st = 0; st < states; ++st) {
    out.probabilities[st] = std::exp(-beta * (out.energies[st] - emin));
    z += out.probabilities[st];
  }
  for (auto& p : out.probabilities) p /= z;
  for (std::size_t st = 0; st < states; ++st) out.mean += out.probabilities[st] * out.energies[st];
  for (std::size_t st = 0; st < states; ++st) {
    const double d = out.energies[st] - out.mean;
    out.variance += out.probabilities[st] * d * d;
  }
  return out;
}

/// Free spins = the genome's non-sensor neurons.
inline Enumeration enumerate_clamped(const isingevo::IsingGenome& g,
                                     const std::vector<double>& sensor_values, double beta) {
  std::vector<double> clamped(g.topology.size(), 0.0);
  const auto sensors = g.topology.sensors();
  for (std::size_t k = 0; k < sensors.size(); ++k) clamped[sensors[k]] = sensor_values[k];
  const auto ns = g.topology.non_sensors();
  return enumerate(g, clamped, std::vector<std::size_t>(ns.begin(), ns.end()), beta);
}

/// Every neuron free, sensors included.
inline Enumeration enumerate_all(const isingevo::IsingGenome& g, double beta) {
  std::vector<std::size_t> free(g.topology.size());
  for (std::size_t i = 0; i < free.size(); ++i) free[i] = i;
  return enumerate(g, std::vector<double>(g.topology.size(), 0.0), free, beta);
}

/// Nearest food by scanning the nine periodic images of every item.
inline std::pair<std::size_t, double> nearest_food(std::span<const isingevo::Vec2> food,
                                                   isingevo::Vec2 p, double size) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < food.size(); ++k) {
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        const double x = food[k].x + dx * size - p.x;
        const double y = food[k].y + dy * size - p.y;
        const double d = std::sqrt(x * x + y * y);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
    }
  }
  return {best, best_d};
}

/// U of sample a (pairs with a > b, ties one half), by direct pair count.
inline double pair_count_u(std::span<const double> a, std::span<const double> b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return u;
}

/// One-sided permutation p-value by enumerating every relabelling of the
/// pooled sample into groups of the original sizes.
inline double permutation_p(std::span<const double> a, std::span<const double> b, bool greater) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const double observed = pair_count_u(a, b);
  const std::size_t n = pooled.size();
  std::size_t total = 0;
  std::size_t tail = 0;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != a.size()) continue;
    std::vector<double> ga;
    std::vector<double> gb;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1U ? ga : gb).push_back(pooled[i]);
    const double u = pair_count_u(ga, gb);
    ++total;
    if (greater ? u >= observed - 1e-12 : u <= observed + 1e-12) ++tail;
  }
  return static_cast<double>(tail) / static_cast<double>(total);
}

/// Counts of values in [edges[b], edges[b+1]), the last bin closed.
inline std::vector<std::size_t> histogram(std::span<const double> values,
                                          std::span<const double> edges) {
  std::vector<std::size_t> counts(edges.size() - 1, 0);
  for (double v : values) {
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
      const bool last = b + 2 == edges.size();
      if (v >= edges[b] && (v < edges[b + 1] || (last && v <= edges[b + 1]))) {
        ++counts[b];
        break;
      }
    }
  }
  return counts;
}

}  // namespace oracle
