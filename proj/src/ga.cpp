#include "isingevo/ga.hpp"

#include <algorithm>
#include <cmath>

namespace isingevo {

std::string to_string(LineageTag tag) {
  switch (tag) {
    case LineageTag::Init: return "init";
    case LineageTag::Copy: return "copy";
    case LineageTag::Mutate: return "mutate";
    case LineageTag::Mate: return "mate";
    case LineageTag::Elite: return "elite";
    case LineageTag::Sampled: return "sampled";
  }
  return "?";
}

LineageTag lineage_from_string(const std::string& name) {
  for (auto tag : {LineageTag::Init, LineageTag::Copy, LineageTag::Mutate, LineageTag::Mate,
                   LineageTag::Elite, LineageTag::Sampled}) {
    if (to_string(tag) == name) return tag;
  }
  throw std::invalid_argument(fmt::format("unknown lineage tag '{}'", name));
}

void GAConfig::validate() const {
  if (n_elite == 0) throw std::invalid_argument("ga.n_elite must be positive");
  if (n_duplicated == 0 || n_duplicated > n_elite + n_mutants) {
    throw std::invalid_argument("ga.n_duplicated must be in [1, n_elite + n_mutants]");
  }
  if (n_mated > 0 && n_elite + n_mutants < 2) {
    throw std::invalid_argument("mating needs at least two individuals in the pool");
  }
  auto probability = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument(fmt::format("ga.{} must be a probability, got {}", name, p));
    }
  };
  probability(mutation_prob, "mutation_prob");
  probability(edge_flip_prob, "edge_flip_prob");
  if (!(beta_noise_sigma >= 0.0)) throw std::invalid_argument("ga.beta_noise_sigma must be >= 0");
  if (!(weight_bound > 0.0)) throw std::invalid_argument("ga.weight_bound must be positive");
}

IsingGenome mutate(const IsingGenome& genome, Rng& rng, const GAConfig& config) {
  IsingGenome g = genome;
  const auto mask = g.topology.mask();
  if (rng.bernoulli(config.edge_flip_prob) && g.topology.admissible_count() > 0) {
    std::size_t pick = rng.index(g.topology.admissible_count());
    for (std::size_t k = 0; k < mask.size(); ++k) {
      if (!mask[k]) continue;
      if (pick-- == 0) {
        g.adjacency[k] ^= 1;
        break;
      }
    }
  }
  if (const std::size_t edges = g.edge_count(); edges > 0) {
    std::size_t pick = rng.index(edges);
    for (std::size_t k = 0; k < g.adjacency.size(); ++k) {
      if (!g.adjacency[k]) continue;
      if (pick-- == 0) {
        g.weights[k] = rng.uniform(-config.weight_bound, config.weight_bound);
        break;
      }
    }
  }
  double factor = 0.0;
  do {
    factor = rng.normal(1.0, config.beta_noise_sigma);
  } while (!(factor > 0.0));
  g.beta *= factor;
  return g;
}

IsingGenome mate_weighted(const IsingGenome& a, const IsingGenome& b, double w, Rng& rng) {
  if (!(a.topology == b.topology)) {
    throw std::invalid_argument("cannot mate genomes with different layouts");
  }
  // Equal parental values are passed through untouched so that identical
  // parents reproduce exactly for any w.
  auto blend = [w](double x, double y) { return x == y ? x : w * x + (1.0 - w) * y; };
  IsingGenome child = a;
  for (std::size_t k = 0; k < child.weights.size(); ++k) {
    child.weights[k] = blend(a.weights[k], b.weights[k]);
    child.adjacency[k] = rng.bernoulli(w) ? a.adjacency[k] : b.adjacency[k];
  }
  child.beta = blend(a.beta, b.beta);
  return child;
}

IsingGenome mate(const IsingGenome& a, const IsingGenome& b, Rng& rng) {
  const double w = rng.uniform();
  return mate_weighted(a, b, w, rng);
}

Offspring<IsingGenome> next_generation(std::span<const IsingGenome> population,
                                       std::span<const double> fitness, Rng& rng,
                                       const GAConfig& config) {
  return breed(
      population, fitness, rng, config,
      [&config](const IsingGenome& g, Rng& r) { return mutate(g, r, config); },
      [](const IsingGenome& a, const IsingGenome& b, Rng& r) { return mate(a, b, r); });
}

}  // namespace isingevo
