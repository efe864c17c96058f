#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "isingevo/ising.hpp"
#include "isingevo/rng.hpp"
#include "isingevo/stats.hpp"

namespace isingevo {

/// Last operator that produced an individual. GA runs use Copy/Mutate/Mate,
/// ES runs Elite/Sampled, and generation 0 is Init.
enum class LineageTag { Init, Copy, Mutate, Mate, Elite, Sampled };

std::string to_string(LineageTag tag);
LineageTag lineage_from_string(const std::string& name);

struct GAConfig {
  std::size_t n_elite = 20;
  std::size_t n_mutants = 15;
  std::size_t n_mated = 15;
  /// Mutant slots are filled by cycling through this many top-ranked parents.
  std::size_t n_duplicated = 10;
  double mutation_prob = 0.10;
  double beta_noise_sigma = 0.02;
  double edge_flip_prob = 0.5;
  double weight_bound = kWeightBound;

  std::size_t population_size() const { return n_elite + n_mutants + n_mated; }
  void validate() const;
};

/// One composite mutation: with probability edge_flip_prob toggle a uniformly
/// chosen admissible adjacency entry; resample one existing edge weight from
/// U(-bound, bound); multiply beta by N(1, beta_noise_sigma).
IsingGenome mutate(const IsingGenome& genome, Rng& rng, const GAConfig& config);

/// Draws w ~ U(0, 1) and calls mate_weighted.
IsingGenome mate(const IsingGenome& a, const IsingGenome& b, Rng& rng);

/// J and beta are w-weighted averages of the parents; each adjacency entry is
/// taken from a with probability w, otherwise from b. Throws on layout mismatch.
IsingGenome mate_weighted(const IsingGenome& a, const IsingGenome& b, double w, Rng& rng);

template <class Genome>
struct Offspring {
  std::vector<Genome> population;
  std::vector<LineageTag> lineage;
};

/// Elitism / duplication / mating scaffold shared by the genome GA and the
/// real-vector benchmark GA.
///
/// Slots [0, n_elite) copy the ranked top individuals. The next n_mutants
/// slots cycle through the top n_duplicated, each passed through `mutate_fn`
/// with probability mutation_prob. The last n_mated slots mate two distinct
/// parents drawn uniformly from the slots above.
template <class Genome, class MutateFn, class MateFn>
Offspring<Genome> breed(std::span<const Genome> population, std::span<const double> fitness,
                        Rng& rng, const GAConfig& config, MutateFn&& mutate_fn,
                        MateFn&& mate_fn) {
  config.validate();
  if (population.size() != config.population_size()) {
    throw std::invalid_argument(fmt::format("GA expects a population of {}, got {}",
                                            config.population_size(), population.size()));
  }
  if (fitness.size() != population.size()) {
    throw std::invalid_argument("fitness and population sizes differ");
  }
  const auto ranked = descending_order(fitness);

  Offspring<Genome> next;
  next.population.reserve(population.size());
  next.lineage.reserve(population.size());
  for (std::size_t k = 0; k < config.n_elite; ++k) {
    next.population.push_back(population[ranked[k]]);
    next.lineage.push_back(LineageTag::Copy);
  }
  for (std::size_t k = 0; k < config.n_mutants; ++k) {
    const Genome& parent = population[ranked[k % config.n_duplicated]];
    if (rng.bernoulli(config.mutation_prob)) {
      next.population.push_back(mutate_fn(parent, rng));
    } else {
      next.population.push_back(parent);
    }
    next.lineage.push_back(LineageTag::Mutate);
  }
  const std::size_t pool = config.n_elite + config.n_mutants;
  for (std::size_t k = 0; k < config.n_mated; ++k) {
    const std::size_t a = rng.index(pool);
    std::size_t b = rng.index(pool - 1);
    if (b >= a) ++b;
    next.population.push_back(mate_fn(next.population[a], next.population[b], rng));
    next.lineage.push_back(LineageTag::Mate);
  }
  return next;
}

Offspring<IsingGenome> next_generation(std::span<const IsingGenome> population,
                                       std::span<const double> fitness, Rng& rng,
                                       const GAConfig& config);

}  // namespace isingevo
