#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isingevo/config.hpp"
#include "isingevo/criticality.hpp"
#include "isingevo/es.hpp"
#include "isingevo/ga.hpp"
#include "isingevo/ising.hpp"
#include "isingevo/rng.hpp"

namespace isingevo {

/// Environment variable that overrides the config's output_dir.
inline constexpr const char* kOutputEnv = "ISINGEVO_OUT";

/// Precedence: explicit override, then $ISINGEVO_OUT, then config.output_dir.
std::filesystem::path resolve_output_root(const ExperimentConfig& config,
                                          const std::optional<std::filesystem::path>& override);

struct RunOptions {
  std::filesystem::path output_root = "out";
  /// Fan-out across replicates, runs and criticality grid points.
  std::size_t threads = 1;
  /// Continue evolution runs from their latest checkpoint.
  bool resume = false;
  /// Stop evolution runs once this many generations have been evaluated.
  std::optional<std::size_t> stop_after;
};

/// Root of the seed tree for replicate r.
SeedTree replicate_seeds(std::uint64_t seed, std::size_t replicate);

struct PopulationCheckpoint {
  /// Generation that `population` is about to be evaluated as.
  std::size_t generation = 0;
  std::vector<IsingGenome> population;
  std::vector<LineageTag> lineage;
  /// ES runs: search distribution and the adjacency layout.
  std::optional<SearchDistribution> distribution;
  std::optional<IsingGenome> layout;
};

nlohmann::json checkpoint_to_json(const PopulationCheckpoint& checkpoint);
PopulationCheckpoint checkpoint_from_json(const nlohmann::json& j);

/// Contents of final.json in a completed evolution run.
struct FinalPopulation {
  std::size_t generation = 0;
  std::size_t replicate = 0;
  std::vector<IsingGenome> genomes;
  std::vector<double> fitness;
  std::vector<LineageTag> lineage;
};

FinalPopulation load_final(const std::filesystem::path& run_dir);
SensorDataset load_sensor_csv(const std::filesystem::path& file, SensorProvenance provenance);

struct EvolutionResult {
  std::size_t generations_done = 0;
  bool complete = false;
  std::vector<double> initial_fitness;
  std::vector<double> final_fitness;
};

/// Evolves one population into run_dir (GA or ES per config.kind). Writes
/// config.json, generations.csv, summary.csv, delta.csv, sensors_gen0.csv,
/// sensors_final.csv, checkpoints/, final.json and timing.log.
EvolutionResult run_evolution(const ExperimentConfig& config, std::size_t replicate,
                              const std::filesystem::path& run_dir, const RunOptions& options);

/// Runs every replicate / setting of `config` below
/// <output_root>/<config.name>/ and returns that directory.
std::filesystem::path run_experiment(const ExperimentConfig& config, const RunOptions& options);

struct ReplayResult {
  bool matches = false;
  std::vector<double> logged;
  std::vector<double> replayed;
};

/// Re-simulates the final generation of a completed evolution run and
/// writes replay/trace.csv and replay/fitness.csv inside it.
ReplayResult replay_run(const std::filesystem::path& run_dir);

}  // namespace isingevo
