#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "isingevo/es.hpp"
#include "isingevo/ga.hpp"
#include "isingevo/rng.hpp"

namespace isingevo {

enum class BenchmarkKind { Rastrigin, Rosenbrock, Sphere };

std::string to_string(BenchmarkKind kind);
BenchmarkKind benchmark_from_string(const std::string& name);

/// Loss over z = x + translation.
struct BenchmarkObjective {
  BenchmarkKind kind = BenchmarkKind::Sphere;
  std::size_t dim = 50;
  double rastrigin_a = 10.0;
  std::vector<double> translation;

  /// Zero translation of length dim.
  static BenchmarkObjective centered(BenchmarkKind kind, std::size_t dim);
  /// Translation entries drawn from N(0, 1).
  static BenchmarkObjective translated(BenchmarkKind kind, std::size_t dim, Rng& rng);
};

double evaluate(const BenchmarkObjective& objective, std::span<const double> x);

enum class Optimizer { GA, ES };
std::string to_string(Optimizer optimizer);

/// GA on real vectors: mutation resamples one coordinate from N(current, 1).
std::vector<double> mutate_vector(const std::vector<double>& x, Rng& rng);
/// Scalar-weighted average with w ~ U(0, 1).
std::vector<double> mate_vectors(const std::vector<double>& a, const std::vector<double>& b,
                                 Rng& rng);

struct ComparisonConfig {
  std::vector<BenchmarkKind> functions{BenchmarkKind::Rastrigin, BenchmarkKind::Rosenbrock,
                                       BenchmarkKind::Sphere};
  std::size_t dim = 50;
  std::size_t n_runs = 25;
  /// Number of generations after the initial evaluation.
  std::size_t generations = 0;
  /// Initial vectors are drawn from N(0, init_sd^2) per coordinate.
  double init_sd = 1.0;
  GAConfig ga;
  ESConfig es = default_es();

  static ESConfig default_es();
  void validate() const;
};

/// Best-so-far loss per generation (index 0 = initial population) for every
/// run of one optimizer on one function.
struct LossCurves {
  BenchmarkKind function = BenchmarkKind::Sphere;
  Optimizer optimizer = Optimizer::GA;
  std::vector<std::vector<double>> raw;
  /// raw / normalizer
  std::vector<std::vector<double>> normalized;
  /// Median over runs of each run's largest best-so-far loss.
  double normalizer = 1.0;
  std::vector<double> p25;
  std::vector<double> p50;
  std::vector<double> p75;
};

/// Best-so-far loss curve of one run.
std::vector<double> run_ga(const BenchmarkObjective& objective, std::size_t generations,
                           const GAConfig& config, double init_sd, Rng& rng);
std::vector<double> run_es(const BenchmarkObjective& objective, std::size_t generations,
                           const ESConfig& config, double init_sd, Rng& rng);

/// Fills normalizer, normalized and the percentile bands from raw.
void normalize_curves(LossCurves& curves);

/// Runs both optimizers on every configured function. Run r of a function
/// uses the same translation for both optimizers.
std::vector<LossCurves> run_comparison(const ComparisonConfig& config, const SeedTree& seeds,
                                       std::size_t threads = 1);

/// First generation at which the curve drops below threshold, or
/// curve.size() if it never does.
std::size_t generations_to_threshold(std::span<const double> curve, double threshold);

}  // namespace isingevo
