#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "isingevo/ga.hpp"
#include "isingevo/ising.hpp"
#include "isingevo/rng.hpp"
#include "isingevo/world.hpp"

namespace isingevo {

// ---- generalizability ------------------------------------------------------

struct GeneralizabilityResult {
  std::size_t t_train = 0;
  std::size_t t_extend = 0;
  /// Population mean of the energy at the end of each horizon.
  double energy_train = 0.0;
  double energy_extend = 0.0;
  double gamma = 0.0;
};

/// (energy_extend / t_extend) / (energy_train / t_train)
double gamma_t(double energy_train, std::size_t t_train, double energy_extend,
               std::size_t t_extend);

/// gamma_t read off a single energy trace, where trace[t - 1] is the energy
/// after step t.
double gamma_from_trace(std::span<const double> trace, std::size_t t_train, std::size_t t_extend);

/// Runs the population for t_train and for t_extend steps from the same
/// world seeds and compares the mean final energies.
GeneralizabilityResult generalizability(std::span<const IsingGenome> population,
                                        const WorldConfig& world, std::size_t t_train,
                                        std::size_t t_extend, const SeedTree& seeds);

// ---- genetic perturbation --------------------------------------------------

/// Adds +f or -f (fair coin per edge) to every existing edge weight and
/// clamps to [-bound, bound]. Adjacency and beta are unchanged.
IsingGenome perturb_genome(const IsingGenome& genome, double f_pert, Rng& rng,
                           double bound = kWeightBound);

/// 0 followed by 12 log-spaced magnitudes in [0.01, 2].
std::vector<double> default_perturbation_grid();

struct PerturbationSweep {
  std::vector<double> f_pert;
  /// samples[k] holds per-agent fitness at f_pert[k], pooled over replicates.
  std::vector<std::vector<double>> samples;
  std::vector<double> mean_fitness;
};

/// Perturbs every genome at each magnitude and evaluates the perturbed
/// population in a shared world, `replicates` times per magnitude.
PerturbationSweep perturbation_sweep(std::span<const IsingGenome> population,
                                     const WorldConfig& world, std::span<const double> f_grid,
                                     std::size_t replicates, const SeedTree& seeds,
                                     std::size_t threads = 1);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Indices dropped because fitness - baseline was not positive.
  std::vector<std::size_t> excluded;
};

/// Least-squares line through (f, ln(fitness - baseline)). At least four
/// usable points are required.
DecayFit decay_exponent(std::span<const double> f_pert, std::span<const double> mean_fitness,
                        double baseline = 0.0);

// ---- operator histograms ---------------------------------------------------

struct LineageRecord {
  std::size_t generation = 0;
  std::size_t agent_id = 0;
  double fitness = 0.0;
  LineageTag lineage = LineageTag::Init;
};

struct OperatorHistogram {
  /// bins + 1 shared edges
  std::vector<double> edges;
  std::array<std::vector<std::size_t>, 3> counts;  // copy, mutate, mate

  std::span<const std::size_t> of(LineageTag tag) const;
};

/// Fitness histograms of Copy, Mutate and Mate individuals with generation in
/// [first, last]. Throws if the window is not inside the logged range.
OperatorHistogram operator_histogram(std::span<const LineageRecord> records, std::size_t first,
                                     std::size_t last, std::size_t bins = 20);

struct LineageCounts {
  std::size_t copy = 0;
  std::size_t mutate = 0;
  std::size_t mate = 0;
  std::size_t other = 0;
};
LineageCounts count_lineage(std::span<const LineageTag> tags);

// ---- Mann-Whitney U --------------------------------------------------------

/// Greater: a tends to exceed b. Less: a tends to fall below b.
enum class Alternative { Greater, Less };

struct MannWhitneyResult {
  /// Number of (a, b) pairs with a > b, ties counting one half.
  double u = 0.0;
  double p = 1.0;
  bool exact = false;
};

/// Exact null distribution (over all splits of the pooled midranks) when
/// |a| * |b| <= 200, otherwise the tie-corrected normal approximation with
/// continuity correction. A fully tied pooled sample gives p = 0.5.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 Alternative alternative);

/// Mean of `values` over the k entries with the highest fitness.
double top_k_mean(std::span<const double> fitness, std::span<const double> values, std::size_t k);

}  // namespace isingevo
