#include "isingevo/es.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace isingevo {

void ESConfig::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("es.alpha must be non-negative");
  if (!(sigma >= 0.0)) throw std::invalid_argument("es.sigma must be non-negative");
  if (!(sigma_beta_ratio >= 0.0)) throw std::invalid_argument("es.sigma_beta_ratio must be >= 0");
  if (population < 2) throw std::invalid_argument("es.population must be at least 2");
  if (n_elite >= population) throw std::invalid_argument("es.n_elite must be below population");
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw std::invalid_argument("es.sparsity must be in [0, 1]");
  }
  if (!(bound > 0.0)) throw std::invalid_argument("es.bound must be positive");
  if (!(beta_floor > 0.0)) throw std::invalid_argument("es.beta_floor must be positive");
}

SampledPopulation sample_population(const SearchDistribution& dist, Rng& rng,
                                    const ESConfig& config) {
  config.validate();
  const std::size_t dim = dist.mean.size();
  SampledPopulation out;
  out.candidates.reserve(config.population);
  const std::size_t n_elites = std::min(dist.elites.size(), config.n_elite);
  for (std::size_t k = 0; k < n_elites; ++k) {
    const Candidate& e = dist.elites[k];
    if (e.params.size() != dim) throw std::invalid_argument("elite dimension mismatch");
    std::vector<double> eps(dim, 0.0);
    if (config.sigma > 0.0) {
      for (std::size_t j = 0; j < dim; ++j) eps[j] = (e.params[j] - dist.mean[j]) / config.sigma;
    }
    const double sb = config.sigma_beta();
    out.beta_epsilons.push_back(sb > 0.0 ? (e.beta - dist.mean_beta) / sb : 0.0);
    out.epsilons.push_back(std::move(eps));
    out.candidates.push_back(e);
    out.lineage.push_back(LineageTag::Elite);
  }
  while (out.candidates.size() < config.population) {
    Candidate c;
    c.params.resize(dim);
    std::vector<double> eps(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!rng.bernoulli(config.sparsity)) eps[j] = rng.normal();
      c.params[j] = std::clamp(dist.mean[j] + config.sigma * eps[j], -config.bound, config.bound);
    }
    double beta_eps = 0.0;
    c.beta = dist.mean_beta;
    if (config.evolve_beta) {
      beta_eps = rng.normal();
      c.beta = std::max(dist.mean_beta + config.sigma_beta() * beta_eps, config.beta_floor);
    }
    out.candidates.push_back(std::move(c));
    out.epsilons.push_back(std::move(eps));
    out.beta_epsilons.push_back(beta_eps);
    out.lineage.push_back(LineageTag::Sampled);
  }
  return out;
}

std::vector<double> rank_fitness(std::span<const double> raw) {
  const std::size_t n = raw.size();
  if (n < 2) throw std::invalid_argument("rank_fitness needs at least two values");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return raw[a] < raw[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && raw[idx[j + 1]] == raw[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  const double m = mean(ranks);
  const double sd = std::sqrt(variance(ranks));
  std::vector<double> out(n, 0.0);
  if (sd == 0.0) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = (ranks[i] - m) / sd;
  return out;
}

SearchDistribution update_mean(const SearchDistribution& dist,
                               std::span<const Candidate> candidates,
                               std::span<const double> raw_fitness,
                               std::span<const double> ranked_fitness, const ESConfig& config) {
  const std::size_t n = candidates.size();
  if (n == 0 || raw_fitness.size() != n || ranked_fitness.size() != n) {
    throw std::invalid_argument("update_mean: candidates and fitness are not aligned");
  }
  const std::size_t dim = dist.mean.size();
  const auto order = descending_order(raw_fitness);
  const Candidate& best = candidates[order.front()];
  if (best.params.size() != dim) throw std::invalid_argument("candidate dimension mismatch");

  auto coefficient = [&](double scale) {
    if (config.alpha == 0.0) return 0.0;
    if (!(scale > 0.0)) throw std::invalid_argument("update_mean needs a positive step scale");
    return config.alpha / (static_cast<double>(n) * scale);
  };

  SearchDistribution next;
  next.mean = best.params;
  const double cj = coefficient(config.sigma);
  if (cj != 0.0) {
    std::vector<double> grad(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = ranked_fitness[i];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < dim; ++j) grad[j] += f * (candidates[i].params[j] - best.params[j]);
    }
    for (std::size_t j = 0; j < dim; ++j) next.mean[j] += cj * grad[j];
  }
  for (auto& m : next.mean) m = std::clamp(m, -config.bound, config.bound);

  next.mean_beta = best.beta;
  if (config.evolve_beta) {
    const double cb = coefficient(config.sigma_beta());
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i) g += ranked_fitness[i] * (candidates[i].beta - best.beta);
    next.mean_beta += cb * g;
  } else {
    next.mean_beta = dist.mean_beta;
  }
  next.mean_beta = std::max(next.mean_beta, config.beta_floor);

  const std::size_t n_elites = std::min(config.n_elite, n);
  for (std::size_t k = 0; k < n_elites; ++k) next.elites.push_back(candidates[order[k]]);
  return next;
}

EsGeneration run_es_generation(const BatchObjective& objective, const SearchDistribution& dist,
                               Rng& rng, const ESConfig& config) {
  EsGeneration out;
  out.population = sample_population(dist, rng, config);
  out.fitness = objective(out.population.candidates);
  if (out.fitness.size() != out.population.candidates.size()) {
    throw std::runtime_error("objective returned the wrong number of fitness values");
  }
  const auto ranked = rank_fitness(out.fitness);
  out.next = update_mean(dist, out.population.candidates, out.fitness, ranked, config);
  out.summary = summarize(out.fitness);
  return out;
}

Candidate genome_to_candidate(const IsingGenome& genome) {
  Candidate c;
  const auto mask = genome.topology.mask();
  c.params.reserve(genome.topology.admissible_count());
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k]) c.params.push_back(genome.weights[k]);
  }
  c.beta = genome.beta;
  return c;
}

IsingGenome candidate_to_genome(const IsingGenome& layout, const Candidate& candidate) {
  if (candidate.params.size() != layout.topology.admissible_count()) {
    throw std::invalid_argument(fmt::format("candidate has {} parameters, layout admits {}",
                                            candidate.params.size(),
                                            layout.topology.admissible_count()));
  }
  IsingGenome g = layout;
  const auto mask = g.topology.mask();
  std::size_t p = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k]) g.weights[k] = candidate.params[p++];
  }
  g.beta = candidate.beta;
  return g;
}

}  // namespace isingevo
