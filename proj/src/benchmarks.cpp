#include "isingevo/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "isingevo/parallel.hpp"
#include "isingevo/stats.hpp"

namespace isingevo {

std::string to_string(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::Rastrigin: return "rastrigin";
    case BenchmarkKind::Rosenbrock: return "rosenbrock";
    case BenchmarkKind::Sphere: return "sphere";
  }
  return "?";
}

BenchmarkKind benchmark_from_string(const std::string& name) {
  if (name == "rastrigin") return BenchmarkKind::Rastrigin;
  if (name == "rosenbrock") return BenchmarkKind::Rosenbrock;
  if (name == "sphere") return BenchmarkKind::Sphere;
  throw std::invalid_argument(fmt::format("unknown benchmark function '{}'", name));
}

std::string to_string(Optimizer optimizer) { return optimizer == Optimizer::GA ? "ga" : "es"; }

BenchmarkObjective BenchmarkObjective::centered(BenchmarkKind kind, std::size_t dim) {
  BenchmarkObjective obj;
  obj.kind = kind;
  obj.dim = dim;
  obj.translation.assign(dim, 0.0);
  return obj;
}

BenchmarkObjective BenchmarkObjective::translated(BenchmarkKind kind, std::size_t dim, Rng& rng) {
  BenchmarkObjective obj = centered(kind, dim);
  for (auto& c : obj.translation) c = rng.normal();
  return obj;
}

double evaluate(const BenchmarkObjective& objective, std::span<const double> x) {
  if (x.size() != objective.dim || objective.translation.size() != objective.dim) {
    throw std::invalid_argument(fmt::format("benchmark expects dimension {}, got {}",
                                            objective.dim, x.size()));
  }
  const std::size_t n = objective.dim;
  auto z = [&](std::size_t i) { return x[i] + objective.translation[i]; };
  double sum = 0.0;
  switch (objective.kind) {
    case BenchmarkKind::Rastrigin: {
      const double a = objective.rastrigin_a;
      sum = a * static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double zi = z(i);
        sum += zi * zi - a * std::cos(2.0 * std::numbers::pi * zi);
      }
      break;
    }
    case BenchmarkKind::Rosenbrock:
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double zi = z(i);
        const double r = z(i + 1) - zi * zi;
        sum += 100.0 * r * r + (1.0 - zi) * (1.0 - zi);
      }
      break;
    case BenchmarkKind::Sphere:
      for (std::size_t i = 0; i < n; ++i) sum += z(i) * z(i);
      break;
  }
  return sum;
}

std::vector<double> mutate_vector(const std::vector<double>& x, Rng& rng) {
  if (x.empty()) throw std::invalid_argument("cannot mutate an empty vector");
  std::vector<double> out = x;
  const std::size_t i = rng.index(out.size());
  out[i] = rng.normal(out[i], 1.0);
  return out;
}

std::vector<double> mate_vectors(const std::vector<double>& a, const std::vector<double>& b,
                                 Rng& rng) {
  if (a.size() != b.size()) throw std::invalid_argument("cannot mate vectors of different sizes");
  const double w = rng.uniform();
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] == b[i] ? a[i] : w * a[i] + (1.0 - w) * b[i];
  return out;
}

ESConfig ComparisonConfig::default_es() {
  ESConfig es;
  es.bound = std::numeric_limits<double>::infinity();
  es.evolve_beta = false;
  return es;
}

void ComparisonConfig::validate() const {
  if (functions.empty()) throw std::invalid_argument("benchmark.functions must not be empty");
  if (dim == 0) throw std::invalid_argument("benchmark.dim must be positive");
  if (n_runs == 0) throw std::invalid_argument("benchmark.n_runs must be positive");
  if (generations == 0) throw std::invalid_argument("benchmark.generations must be set");
  if (!(init_sd > 0.0)) throw std::invalid_argument("benchmark.init_sd must be positive");
  ga.validate();
  es.validate();
}

namespace {

void track_best(std::vector<double>& curve, std::span<const double> losses) {
  double best = *std::min_element(losses.begin(), losses.end());
  if (!curve.empty()) best = std::min(best, curve.back());
  curve.push_back(best);
}

}  // namespace

std::vector<double> run_ga(const BenchmarkObjective& objective, std::size_t generations,
                           const GAConfig& config, double init_sd, Rng& rng) {
  config.validate();
  std::vector<std::vector<double>> pop(config.population_size(),
                                       std::vector<double>(objective.dim));
  for (auto& x : pop) {
    for (auto& v : x) v = rng.normal(0.0, init_sd);
  }
  std::vector<double> curve;
  curve.reserve(generations + 1);
  std::vector<double> loss(pop.size());
  std::vector<double> fitness(pop.size());
  for (std::size_t g = 0;; ++g) {
    for (std::size_t i = 0; i < pop.size(); ++i) {
      loss[i] = evaluate(objective, pop[i]);
      fitness[i] = -loss[i];
    }
    track_best(curve, loss);
    if (g == generations) break;
    auto next = breed<std::vector<double>>(
        pop, fitness, rng, config,
        [](const std::vector<double>& x, Rng& r) { return mutate_vector(x, r); },
        [](const std::vector<double>& a, const std::vector<double>& b, Rng& r) {
          return mate_vectors(a, b, r);
        });
    pop = std::move(next.population);
  }
  return curve;
}

std::vector<double> run_es(const BenchmarkObjective& objective, std::size_t generations,
                           const ESConfig& config, double init_sd, Rng& rng) {
  config.validate();
  SearchDistribution dist;
  dist.mean.resize(objective.dim);
  for (auto& v : dist.mean) v = rng.normal(0.0, init_sd);
  std::vector<double> curve;
  curve.reserve(generations + 1);
  std::vector<double> loss;
  const BatchObjective batch = [&](std::span<const Candidate> cands) {
    loss.resize(cands.size());
    std::vector<double> fitness(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
      loss[i] = evaluate(objective, cands[i].params);
      fitness[i] = -loss[i];
    }
    return fitness;
  };
  for (std::size_t g = 0; g <= generations; ++g) {
    auto gen = run_es_generation(batch, dist, rng, config);
    track_best(curve, loss);
    dist = std::move(gen.next);
  }
  return curve;
}

void normalize_curves(LossCurves& curves) {
  if (curves.raw.empty()) throw std::invalid_argument("no loss curves to normalize");
  const std::size_t len = curves.raw.front().size();
  std::vector<double> maxima;
  for (const auto& c : curves.raw) {
    if (c.size() != len || c.empty()) throw std::invalid_argument("loss curves differ in length");
    maxima.push_back(*std::max_element(c.begin(), c.end()));
  }
  curves.normalizer = median(maxima);
  if (!(curves.normalizer > 0.0)) curves.normalizer = 1.0;
  curves.normalized = curves.raw;
  for (auto& c : curves.normalized) {
    for (auto& v : c) v /= curves.normalizer;
  }
  curves.p25.resize(len);
  curves.p50.resize(len);
  curves.p75.resize(len);
  std::vector<double> column(curves.raw.size());
  for (std::size_t g = 0; g < len; ++g) {
    for (std::size_t r = 0; r < column.size(); ++r) column[r] = curves.normalized[r][g];
    curves.p25[g] = quantile(column, 0.25);
    curves.p50[g] = quantile(column, 0.5);
    curves.p75[g] = quantile(column, 0.75);
  }
}

std::vector<LossCurves> run_comparison(const ComparisonConfig& config, const SeedTree& seeds,
                                       std::size_t threads) {
  config.validate();
  std::vector<LossCurves> out;
  for (const auto kind : config.functions) {
    const SeedTree fn_seeds = seeds.child(static_cast<std::uint64_t>(kind));
    LossCurves ga{kind, Optimizer::GA, {}, {}, 1.0, {}, {}, {}};
    LossCurves es{kind, Optimizer::ES, {}, {}, 1.0, {}, {}, {}};
    ga.raw.resize(config.n_runs);
    es.raw.resize(config.n_runs);
    parallel_for(config.n_runs, threads, [&](std::size_t r) {
      const SeedTree run = fn_seeds.child(r);
      Rng trng = run.child(stream::kBenchmark).rng();
      const auto objective = BenchmarkObjective::translated(kind, config.dim, trng);
      Rng ga_rng = run.path(stream::kEvolution, 0).rng();
      Rng es_rng = run.path(stream::kEvolution, 1).rng();
      ga.raw[r] = run_ga(objective, config.generations, config.ga, config.init_sd, ga_rng);
      es.raw[r] = run_es(objective, config.generations, config.es, config.init_sd, es_rng);
    });
    normalize_curves(ga);
    normalize_curves(es);
    out.push_back(std::move(ga));
    out.push_back(std::move(es));
  }
  return out;
}

std::size_t generations_to_threshold(std::span<const double> curve, double threshold) {
  for (std::size_t g = 0; g < curve.size(); ++g) {
    if (curve[g] < threshold) return g;
  }
  return curve.size();
}

}  // namespace isingevo
