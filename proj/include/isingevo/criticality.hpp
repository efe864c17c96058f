#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "isingevo/ising.hpp"
#include "isingevo/rng.hpp"
#include "isingevo/world.hpp"

namespace isingevo {

enum class SensorProvenance { Generation0, FinalGeneration, Thermalized };
enum class SensorMode { Thermalized, Clipped };

std::string to_string(SensorProvenance p);
std::string to_string(SensorMode m);

/// Flat list of fixed-length sensor vectors with entries in [-1, 1].
class SensorDataset {
 public:
  SensorDataset(std::size_t dim, SensorProvenance provenance);

  static SensorDataset from_log(std::span<const SensorRecord> log, SensorProvenance provenance);

  void add(std::span<const double> sample);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const { return values_.empty(); }
  std::span<const double> sample(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * dim_, dim_);
  }
  SensorProvenance provenance() const { return provenance_; }

 private:
  std::size_t dim_;
  std::vector<double> values_;
  SensorProvenance provenance_;
};

/// Geometric cooling from start_scale times the target temperature down to
/// the target, followed by measurement. In clipped mode the clamped sensor
/// vector is redrawn every `sensor_refresh` measurement sweeps and the chain
/// re-equilibrates for `burn_in` sweeps after each redraw.
struct AnnealingSchedule {
  double start_scale = 20.0;
  std::size_t n_stages = 20;
  std::size_t sweeps_per_stage = 50;
  std::size_t measurement_sweeps = 2000;
  std::size_t burn_in = 20;
  std::size_t sensor_refresh = 100;
  /// Repeat the full cooling run after each sensor redraw instead of only
  /// the burn-in sweeps.
  bool anneal_each_refresh = true;

  void validate() const;
};

struct EnergyMoments {
  double mean = 0.0;
  /// Within-block variance averaged over sensor blocks.
  double variance = 0.0;
};

/// Samples the network energy at inverse temperature c_beta * genome.beta.
/// Thermalized mode treats sensor neurons as ordinary +-1 spins; clipped mode
/// clamps them to vectors drawn from `data`, which must be non-empty.
EnergyMoments estimate_var_energy(const IsingGenome& genome, double c_beta, SensorMode mode,
                                  const SensorDataset* data, const AnnealingSchedule& schedule,
                                  Rng& rng, DynamicsOptions dynamics = {});

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

struct HeatCapacityCurve {
  std::vector<double> grid;
  std::vector<double> values;
  double c_beta_crit = 0.0;
  /// log10(c_beta_crit)
  double delta = 0.0;
};

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax_first(std::span<const double> values);

/// C_H(c) = c^2 beta^2 Var(e) on an ascending grid. Grid point k uses the
/// stream seeds.child(k), so results do not depend on `threads`.
HeatCapacityCurve heat_capacity_curve(const IsingGenome& genome, std::span<const double> grid,
                                      SensorMode mode, const SensorDataset* data,
                                      const AnnealingSchedule& schedule, const SeedTree& seeds,
                                      std::size_t threads = 1, DynamicsOptions dynamics = {});

/// Random layout for the finite-size study: floor(n/3) sensors, floor(n/3)
/// motors, the rest hidden; all admissible edges present with U(-1, 1)
/// weights, rescaled so that the effective coupling matrix AJ + (AJ)^T has
/// Frobenius norm sqrt(n). Beta is 1.
IsingGenome scaling_genome(std::size_t n, Rng& rng);

struct ScalingConfig {
  std::vector<std::size_t> sizes{12, 25, 100};
  std::size_t ensemble_size = 20;
  std::size_t n_sensor_vectors = 100;
  std::vector<double> grid = log_grid(1e-2, 1e2, 60);
  AnnealingSchedule schedule;
};

struct ScalingPoint {
  std::size_t n = 0;
  std::vector<double> grid;
  std::vector<std::vector<double>> curves;
  /// Pointwise median over the ensemble.
  std::vector<double> median_curve;
  /// Median over the ensemble of each curve's maximum.
  double median_peak = 0.0;
  /// Location of the maximum of the median curve.
  double peak_beta = 0.0;
  std::vector<double> peak_betas;
};

std::vector<ScalingPoint> scaling_analysis(const ScalingConfig& config, const SeedTree& seeds,
                                           std::size_t threads = 1);

struct SensorModeComparison {
  std::vector<double> grid;
  std::vector<double> thermalized;
  std::vector<double> generation0;
  std::vector<double> final_generation;
};

/// Mean heat-capacity curves over `genomes` in the three sensor treatments.
SensorModeComparison compare_sensor_modes(std::span<const IsingGenome> genomes,
                                          const SensorDataset& generation0,
                                          const SensorDataset& final_generation,
                                          std::span<const double> grid,
                                          const AnnealingSchedule& schedule,
                                          const SeedTree& seeds, std::size_t threads = 1);

}  // namespace isingevo
