#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "isingevo/config.hpp"
#include "isingevo/experiment.hpp"
#include "isingevo/genome_io.hpp"

namespace {

using isingevo::ConfigError;
using isingevo::ExperimentKind;
using nlohmann::json;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> name;
  std::optional<std::string> out;
  std::size_t threads = 1;
};

json read_config_json(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

// Builds the resolved config for a verb. The verb fixes the experiment kind
// unless the file names another kind the verb also accepts.
isingevo::ExperimentConfig resolve(const GlobalFlags& flags, std::vector<ExperimentKind> accepted,
                                   const std::optional<std::string>& source_run = std::nullopt) {
  json j = read_config_json(flags.config);
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) throw ConfigError("kind must be a string");
    const auto kind = isingevo::experiment_kind_from_string(j["kind"].get<std::string>());
    if (std::find(accepted.begin(), accepted.end(), kind) == accepted.end()) {
      throw ConfigError(fmt::format("config kind '{}' does not fit this command",
                                    j["kind"].get<std::string>()));
    }
  } else {
    j["kind"] = isingevo::to_string(accepted.front());
  }
  if (flags.seed) j["seed"] = *flags.seed;
  if (flags.name) j["name"] = *flags.name;
  if (source_run) j["source_run"] = *source_run;
  return isingevo::config_from_json(j);
}

isingevo::RunOptions run_options(const GlobalFlags& flags,
                                 const isingevo::ExperimentConfig& config) {
  isingevo::RunOptions opt;
  opt.output_root = isingevo::resolve_output_root(
      config, flags.out ? std::optional<std::filesystem::path>(*flags.out) : std::nullopt);
  opt.threads = flags.threads;
  return opt;
}

void announce(const std::filesystem::path& dir) { fmt::print("{}\n", dir.string()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolving foraging agents controlled by Ising neural networks"};
  app.require_subcommand(1);
  GlobalFlags flags;
  app.add_option("--config", flags.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", flags.seed, "Root seed, overrides the config");
  app.add_option("--name", flags.name, "Experiment name, overrides the config");
  app.add_option("--out", flags.out, "Output root, overrides config and $ISINGEVO_OUT");
  app.add_option("--threads", flags.threads, "Worker threads for independent runs")
      ->check(CLI::PositiveNumber);

  auto* evolve = app.add_subcommand("evolve", "Evolve populations (GA or ES)");
  std::string algorithm;
  bool resume = false;
  std::optional<std::size_t> stop_after;
  evolve->add_option("--algorithm", algorithm, "ga or es, overrides the config kind")
      ->check(CLI::IsMember({"ga", "es"}));
  evolve->add_flag("--resume", resume, "Continue from the latest checkpoints");
  evolve->add_option("--stop-after", stop_after, "Stop after this many generations");

  auto* criticality = app.add_subcommand("criticality", "Heat-capacity scan of an evolved run");
  std::string crit_source;
  bool modes = false;
  criticality->add_option("--source-run", crit_source, "Completed evolution run directory");
  criticality->add_flag("--modes", modes, "Compare the three sensor treatments");

  auto* scaling = app.add_subcommand("scaling", "Finite-size scaling of random networks");

  auto* generalize = app.add_subcommand("generalize", "Generalizability over an extended lifespan");
  std::string gen_source;
  generalize->add_option("--source-run", gen_source, "Completed evolution run directory");

  auto* perturb = app.add_subcommand("perturb", "Genetic perturbation sweep");
  std::string pert_source;
  perturb->add_option("--source-run", pert_source, "Completed evolution run directory");

  auto* benchmark = app.add_subcommand("benchmark", "GA vs ES on benchmark functions");
  auto* thermalize = app.add_subcommand("thermalize", "Thermalization-steps sweep");
  auto* delta_dist = app.add_subcommand("delta-dist", "Distance-to-criticality distributions");

  auto* replay = app.add_subcommand("replay", "Re-simulate the final generation of a run");
  std::string replay_dir;
  replay->add_option("run_dir", replay_dir, "Completed evolution run directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  auto opt_source = [](const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::string>(s);
  };

  try {
    if (*evolve) {
      std::vector<ExperimentKind> kinds{ExperimentKind::EvolveGA, ExperimentKind::EvolveES};
      if (algorithm == "es") kinds = {ExperimentKind::EvolveES};
      if (algorithm == "ga") kinds = {ExperimentKind::EvolveGA};
      auto config = resolve(flags, kinds);
      auto opt = run_options(flags, config);
      opt.resume = resume;
      opt.stop_after = stop_after;
      announce(isingevo::run_experiment(config, opt));
    } else if (*criticality) {
      auto config = resolve(flags, {ExperimentKind::CriticalityScan, ExperimentKind::SensorModes},
                            opt_source(crit_source));
      if (modes) config.kind = ExperimentKind::SensorModes;
      announce(isingevo::run_experiment(config, run_options(flags, config)));
    } else if (*scaling) {
      const auto config = resolve(flags, {ExperimentKind::Scaling});
      announce(isingevo::run_experiment(config, run_options(flags, config)));
    } else if (*generalize) {
      const auto config = resolve(flags, {ExperimentKind::Generalize}, opt_source(gen_source));
      announce(isingevo::run_experiment(config, run_options(flags, config)));
    } else if (*perturb) {
      const auto config = resolve(flags, {ExperimentKind::Perturb}, opt_source(pert_source));
      announce(isingevo::run_experiment(config, run_options(flags, config)));
    } else if (*benchmark) {
      const auto config = resolve(flags, {ExperimentKind::Benchmark});
      announce(isingevo::run_experiment(config, run_options(flags, config)));
    } else if (*thermalize) {
      const auto config = resolve(flags, {ExperimentKind::ThermalizationSweep});
      announce(isingevo::run_experiment(config, run_options(flags, config)));
    } else if (*delta_dist) {
      const auto config = resolve(flags, {ExperimentKind::DeltaDistribution});
      announce(isingevo::run_experiment(config, run_options(flags, config)));
    } else if (*replay) {
      const auto res = isingevo::replay_run(replay_dir);
      fmt::print("{}\n", res.matches ? "replay matches the logged fitness"
                                     : "replay differs from the logged fitness");
      return res.matches ? 0 : 1;
    }
  } catch (const isingevo::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const isingevo::ResumeMismatch& e) {
    fmt::print(stderr, "resume mismatch: {}\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
