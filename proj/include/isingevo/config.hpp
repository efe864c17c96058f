#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "isingevo/analysis.hpp"
#include "isingevo/benchmarks.hpp"
#include "isingevo/criticality.hpp"
#include "isingevo/es.hpp"
#include "isingevo/ga.hpp"
#include "isingevo/world.hpp"

namespace isingevo {

/// Invalid or inconsistent configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Resume requested against a run directory written by another config.
/// Maps to exit code 3.
class ResumeMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  EvolveGA,
  EvolveES,
  CriticalityScan,
  Scaling,
  SensorModes,
  Generalize,
  Perturb,
  Benchmark,
  ThermalizationSweep,
  DeltaDistribution,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct EvolutionSettings {
  std::size_t generations = 4000;
  double beta_init = 1.0;
  std::size_t n_hidden = 4;
  /// Probability that an admissible edge is present in a generation-0 genome.
  double edge_density = 0.5;
  /// Generation-0 weights are drawn from U(-weight_range, weight_range).
  double weight_range = 1.0;
  /// Every this many generations (and at generation 0 and the last one) the
  /// top agents get a heat-capacity scan. 0 disables it.
  std::size_t delta_interval = 0;
  std::size_t delta_top_k = 5;
  /// Sensor readings are logged every this many steps.
  std::size_t sensor_stride = 1;
};

struct GridSettings {
  double lo = 1e-2;
  double hi = 1e2;
  std::size_t n = 60;

  std::vector<double> values() const { return log_grid(lo, hi, n); }
};

struct CriticalitySettings {
  GridSettings grid;
  AnnealingSchedule schedule;
  SensorMode sensor_mode = SensorMode::Clipped;
  /// Number of top agents of the source population to scan; 0 means all.
  std::size_t top_k = 0;
};

struct ScalingSettings {
  std::vector<std::size_t> sizes{12, 25, 100};
  std::size_t ensemble_size = 20;
  std::size_t n_sensor_vectors = 100;
};

struct GeneralizeSettings {
  std::size_t t_train = 2000;
  std::size_t t_extend = 50000;
};

struct PerturbSettings {
  std::vector<double> f_grid = default_perturbation_grid();
  std::size_t replicates = 1;
  double fit_baseline = 0.0;
};

struct ThermalizationSweepSettings {
  std::vector<int> settings{1, 5, 10, 20, 40};
  std::size_t replicates = 5;
};

struct DeltaDistributionSettings {
  std::vector<std::string> simple_runs;
  std::vector<std::string> hard_runs;
  std::size_t top_k = 30;
};

/// Fully resolved experiment description. Missing keys take the defaults
/// above; unknown keys are rejected.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::EvolveGA;
  std::string name = "experiment";
  std::uint64_t seed = 1;
  std::size_t n_replicates = 1;
  std::string output_dir = "out";
  std::size_t checkpoint_interval = 100;
  /// Completed evolution run consumed by the analysis kinds.
  std::string source_run;

  WorldConfig world;
  GAConfig ga;
  ESConfig es;
  EvolutionSettings evolution;
  CriticalitySettings criticality;
  ScalingSettings scaling;
  GeneralizeSettings generalize;
  PerturbSettings perturb;
  ComparisonConfig benchmark;
  ThermalizationSweepSettings thermalization_sweep;
  DeltaDistributionSettings delta_distribution;

  /// Throws ConfigError.
  void validate() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace isingevo
