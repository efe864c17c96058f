#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "isingevo/ga.hpp"
#include "isingevo/ising.hpp"
#include "isingevo/rng.hpp"
#include "isingevo/stats.hpp"

namespace isingevo {

struct ESConfig {
  double alpha = 0.1;
  double sigma = 0.1;
  /// sigma_beta = sigma_beta_ratio * sigma
  double sigma_beta_ratio = 0.1;
  std::size_t population = 50;
  std::size_t n_elite = 6;
  /// Probability that an individual epsilon entry is zeroed.
  double sparsity = 0.5;
  /// Parameters are clamped to [-bound, bound]; infinity disables clamping.
  double bound = kWeightBound;
  bool evolve_beta = true;
  double beta_floor = 1e-3;

  double sigma_beta() const { return sigma_beta_ratio * sigma; }
  void validate() const;
};

struct Candidate {
  std::vector<double> params;
  double beta = 1.0;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Gaussian search distribution N(mean, sigma I) plus the elites carried
/// into the next batch.
struct SearchDistribution {
  std::vector<double> mean;
  double mean_beta = 1.0;
  std::vector<Candidate> elites;
};

struct SampledPopulation {
  std::vector<Candidate> candidates;
  /// Unit-scale perturbations; for elites (candidate - mean) / sigma.
  std::vector<std::vector<double>> epsilons;
  std::vector<double> beta_epsilons;
  std::vector<LineageTag> lineage;
};

/// The stored elites come first, followed by mean + sigma * eps samples with
/// each eps entry zeroed with probability `sparsity`.
SampledPopulation sample_population(const SearchDistribution& dist, Rng& rng,
                                    const ESConfig& config);

/// Centered, standardized ranks (average rank for ties). All-equal input
/// gives all zeros. Throws for fewer than two values.
std::vector<double> rank_fitness(std::span<const double> raw);

/// mean' = J* + alpha / (n sigma) * sum_i F_i (J_i - J*), where J* is the
/// candidate with the highest raw fitness; beta moves the same way with
/// sigma_beta. The new elites are the top n_elite candidates by raw fitness.
SearchDistribution update_mean(const SearchDistribution& dist,
                               std::span<const Candidate> candidates,
                               std::span<const double> raw_fitness,
                               std::span<const double> ranked_fitness, const ESConfig& config);

/// Maps a batch of candidates to raw fitness (higher is better).
using BatchObjective = std::function<std::vector<double>(std::span<const Candidate>)>;

struct EsGeneration {
  SearchDistribution next;
  SampledPopulation population;
  std::vector<double> fitness;
  FitnessSummary summary;
};

EsGeneration run_es_generation(const BatchObjective& objective, const SearchDistribution& dist,
                               Rng& rng, const ESConfig& config);

/// Weights at the admissible entries of the layout, row-major.
Candidate genome_to_candidate(const IsingGenome& genome);
/// Writes candidate weights into the admissible entries of `layout`; the
/// adjacency is kept from `layout`.
IsingGenome candidate_to_genome(const IsingGenome& layout, const Candidate& candidate);

}  // namespace isingevo
