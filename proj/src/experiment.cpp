#include "isingevo/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <memory>

#include <fmt/format.h>

#include "isingevo/analysis.hpp"
#include "isingevo/benchmarks.hpp"
#include "isingevo/csv.hpp"
#include "isingevo/genome_io.hpp"
#include "isingevo/parallel.hpp"
#include "isingevo/stats.hpp"
#include "isingevo/world.hpp"

namespace isingevo {

namespace fs = std::filesystem;
using nlohmann::json;

std::filesystem::path resolve_output_root(const ExperimentConfig& config,
                                          const std::optional<std::filesystem::path>& override) {
  if (override) return *override;
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') return env;
  return config.output_dir;
}

SeedTree replicate_seeds(std::uint64_t seed, std::size_t replicate) {
  return SeedTree(seed).path(stream::kReplicate, replicate);
}

// ---- serialization ---------------------------------------------------------

namespace {

json genomes_to_json(const std::vector<IsingGenome>& genomes) {
  json a = json::array();
  for (const auto& g : genomes) a.push_back(genome_to_json(g));
  return a;
}

std::vector<IsingGenome> genomes_from_json(const json& a) {
  std::vector<IsingGenome> out;
  for (const auto& g : a) out.push_back(genome_from_json(g));
  return out;
}

json lineage_to_json(const std::vector<LineageTag>& tags) {
  json a = json::array();
  for (auto t : tags) a.push_back(to_string(t));
  return a;
}

std::vector<LineageTag> lineage_from_json(const json& a) {
  std::vector<LineageTag> out;
  for (const auto& t : a) out.push_back(lineage_from_string(t.get<std::string>()));
  return out;
}

json candidate_to_json(const Candidate& c) { return json{{"params", c.params}, {"beta", c.beta}}; }

Candidate candidate_from_json(const json& j) {
  Candidate c;
  c.params = j.at("params").get<std::vector<double>>();
  c.beta = j.at("beta").get<double>();
  return c;
}

void require_schema(const json& j, const std::string& what) {
  if (!j.is_object() || j.value("schema", "") != kPopulationSchema ||
      j.value("version", 0) != kGenomeSchemaVersion) {
    throw FormatError(fmt::format("{} is not a version {} population file", what,
                                  kGenomeSchemaVersion));
  }
}

}  // namespace

nlohmann::json checkpoint_to_json(const PopulationCheckpoint& cp) {
  json j{{"schema", kPopulationSchema},
         {"version", kGenomeSchemaVersion},
         {"kind", "checkpoint"},
         {"generation", cp.generation},
         {"genomes", genomes_to_json(cp.population)},
         {"lineage", lineage_to_json(cp.lineage)}};
  if (cp.distribution) {
    json elites = json::array();
    for (const auto& e : cp.distribution->elites) elites.push_back(candidate_to_json(e));
    j["distribution"] = json{{"mean", cp.distribution->mean},
                             {"mean_beta", cp.distribution->mean_beta},
                             {"elites", elites}};
  }
  if (cp.layout) j["layout"] = genome_to_json(*cp.layout);
  return j;
}

PopulationCheckpoint checkpoint_from_json(const nlohmann::json& j) {
  require_schema(j, "checkpoint");
  PopulationCheckpoint cp;
  try {
    cp.generation = j.at("generation").get<std::size_t>();
    cp.population = genomes_from_json(j.at("genomes"));
    cp.lineage = lineage_from_json(j.at("lineage"));
    if (j.contains("distribution")) {
      const auto& d = j["distribution"];
      SearchDistribution dist;
      dist.mean = d.at("mean").get<std::vector<double>>();
      dist.mean_beta = d.at("mean_beta").get<double>();
      for (const auto& e : d.at("elites")) dist.elites.push_back(candidate_from_json(e));
      cp.distribution = std::move(dist);
    }
    if (j.contains("layout")) cp.layout = genome_from_json(j["layout"]);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("malformed checkpoint: {}", e.what()));
  }
  return cp;
}

FinalPopulation load_final(const std::filesystem::path& run_dir) {
  const auto path = run_dir / "final.json";
  if (!fs::exists(path)) throw FormatError(fmt::format("{} not found", path.string()));
  const json j = read_json_file(path);
  require_schema(j, path.string());
  FinalPopulation f;
  try {
    f.generation = j.at("generation").get<std::size_t>();
    f.replicate = j.at("replicate").get<std::size_t>();
    f.genomes = genomes_from_json(j.at("genomes"));
    f.fitness = j.at("fitness").get<std::vector<double>>();
    f.lineage = lineage_from_json(j.at("lineage"));
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
  if (f.fitness.size() != f.genomes.size()) {
    throw FormatError(fmt::format("{}: fitness and genome counts differ", path.string()));
  }
  return f;
}

namespace {

const std::vector<std::string> kSensorColumns{"step", "agent_id", "theta", "dist", "v", "E"};

void write_sensor_csv(const fs::path& file, const std::vector<SensorRecord>& log) {
  CsvWriter w(file, kSensorColumns);
  for (const auto& r : log) {
    w.row(r.step, r.agent_id, r.reading.theta_food, r.reading.d_food, r.reading.v_norm,
          r.reading.e_norm);
  }
}

}  // namespace

SensorDataset load_sensor_csv(const std::filesystem::path& file, SensorProvenance provenance) {
  const auto table = read_csv(file);
  const std::size_t cols[4] = {table.column("theta"), table.column("dist"), table.column("v"),
                               table.column("E")};
  SensorDataset data(4, provenance);
  std::array<double, 4> v{};
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < 4; ++k) v[k] = std::stod(row[cols[k]]);
    data.add(v);
  }
  return data;
}

// ---- evolution -------------------------------------------------------------

namespace {

const std::vector<std::string> kGenerationColumns{"generation", "agent_id", "fitness",
                                                  "lineage_op"};
const std::vector<std::string> kSummaryColumns{"generation", "best", "mean", "median"};
const std::vector<std::string> kDeltaColumns{"generation", "rank",        "agent_id",
                                             "fitness",    "c_beta_crit", "delta"};

// Reopens a CSV keeping only rows whose generation column is below `limit`.
std::unique_ptr<CsvWriter> reopen_truncated(const fs::path& file,
                                            const std::vector<std::string>& columns,
                                            std::size_t limit) {
  std::vector<std::vector<std::string>> kept;
  if (fs::exists(file)) {
    const auto table = read_csv(file);
    if (table.columns != columns) {
      throw ResumeMismatch(fmt::format("{} has unexpected columns", file.string()));
    }
    const std::size_t gcol = table.column("generation");
    for (const auto& row : table.rows) {
      if (std::stoull(row[gcol]) < limit) kept.push_back(row);
    }
  }
  auto w = std::make_unique<CsvWriter>(file, columns);
  for (const auto& row : kept) w->write_row(row);
  return w;
}

std::optional<fs::path> latest_checkpoint(const fs::path& dir) {
  if (!fs::exists(dir)) return std::nullopt;
  std::optional<fs::path> best;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("gen_", 0) != 0 || entry.path().extension() != ".json") continue;
    if (!best || name > best->filename().string()) best = entry.path();
  }
  return best;
}

fs::path checkpoint_path(const fs::path& run_dir, std::size_t generation) {
  return run_dir / "checkpoints" / fmt::format("gen_{:06}.json", generation);
}

// Removes a previous run so that a fresh run starts from an empty directory.
void prepare_fresh_dir(const fs::path& run_dir) {
  if (fs::exists(run_dir) && !fs::is_empty(run_dir)) {
    if (!fs::exists(run_dir / "config.json")) {
      throw ConfigError(fmt::format("{} exists and is not a run directory", run_dir.string()));
    }
    fs::remove_all(run_dir);
  }
  fs::create_directories(run_dir);
}

json run_config_json(const ExperimentConfig& config) { return config_to_json(config); }

void check_resume_config(const fs::path& run_dir, const ExperimentConfig& config) {
  const auto path = run_dir / "config.json";
  if (!fs::exists(path)) throw ResumeMismatch(fmt::format("{} not found", path.string()));
  if (read_json_file(path) != run_config_json(config)) {
    throw ResumeMismatch(
        fmt::format("{} was written by a different configuration", run_dir.string()));
  }
}

bool is_delta_generation(const EvolutionSettings& e, std::size_t g) {
  if (e.delta_interval == 0) return false;
  return g % e.delta_interval == 0 || g + 1 == e.generations;
}

void record_deltas(CsvWriter& out, const ExperimentConfig& config, std::size_t g,
                   const std::vector<IsingGenome>& pop, const std::vector<double>& fitness,
                   const std::vector<SensorRecord>& log, const SeedTree& seeds) {
  const auto data = SensorDataset::from_log(log, SensorProvenance::FinalGeneration);
  const auto order = descending_order(fitness);
  const auto grid = config.criticality.grid.values();
  const auto mode = config.criticality.sensor_mode;
  for (std::size_t r = 0; r < config.evolution.delta_top_k; ++r) {
    const std::size_t a = order[r];
    const auto curve = heat_capacity_curve(pop[a], grid, mode, &data, config.criticality.schedule,
                                           seeds.path(stream::kCriticality, g, r), 1,
                                           config.world.dynamics);
    out.row(g, r, a, fitness[a], curve.c_beta_crit, curve.delta);
  }
}

struct EvolutionState {
  std::size_t generation = 0;
  std::vector<IsingGenome> population;
  std::vector<LineageTag> lineage;
  SearchDistribution distribution;
  IsingGenome layout;
};

EvolutionState initial_state(const ExperimentConfig& config, const SeedTree& seeds) {
  const auto& e = config.evolution;
  const Topology topo = Topology::layered(4, e.n_hidden, 4);
  Rng rng = seeds.child(stream::kInit).rng();
  EvolutionState s;
  if (config.kind == ExperimentKind::EvolveES) {
    s.layout = random_genome(topo, e.beta_init, 1.0, e.weight_range, rng);
    const Candidate c = genome_to_candidate(s.layout);
    s.distribution.mean = c.params;
    s.distribution.mean_beta = e.beta_init;
  } else {
    for (std::size_t i = 0; i < config.ga.population_size(); ++i) {
      s.population.push_back(random_genome(topo, e.beta_init, e.edge_density, e.weight_range, rng));
    }
    s.lineage.assign(s.population.size(), LineageTag::Init);
  }
  return s;
}

PopulationCheckpoint to_checkpoint(const ExperimentConfig& config, const EvolutionState& s) {
  PopulationCheckpoint cp;
  cp.generation = s.generation;
  if (config.kind == ExperimentKind::EvolveES) {
    cp.distribution = s.distribution;
    cp.layout = s.layout;
  } else {
    cp.population = s.population;
    cp.lineage = s.lineage;
  }
  return cp;
}

EvolutionState from_checkpoint(const ExperimentConfig& config, PopulationCheckpoint cp) {
  EvolutionState s;
  s.generation = cp.generation;
  if (config.kind == ExperimentKind::EvolveES) {
    if (!cp.distribution || !cp.layout) throw ResumeMismatch("ES checkpoint lacks its distribution");
    s.distribution = std::move(*cp.distribution);
    s.layout = std::move(*cp.layout);
  } else {
    if (cp.population.size() != config.ga.population_size()) {
      throw ResumeMismatch("checkpoint population size does not match the config");
    }
    s.population = std::move(cp.population);
    s.lineage = std::move(cp.lineage);
  }
  return s;
}

}  // namespace

EvolutionResult run_evolution(const ExperimentConfig& config, std::size_t replicate,
                              const std::filesystem::path& run_dir, const RunOptions& options) {
  if (config.kind != ExperimentKind::EvolveGA && config.kind != ExperimentKind::EvolveES) {
    throw ConfigError("run_evolution needs an evolve_ga or evolve_es config");
  }
  config.validate();
  const bool es = config.kind == ExperimentKind::EvolveES;
  const auto& evo = config.evolution;
  const SeedTree seeds = replicate_seeds(config.seed, replicate);

  EvolutionState state;
  bool resumed = false;
  if (options.resume && fs::exists(run_dir / "config.json")) {
    check_resume_config(run_dir, config);
    if (fs::exists(run_dir / "final.json")) {
      EvolutionResult done;
      done.complete = true;
      done.generations_done = evo.generations;
      done.final_fitness = load_final(run_dir).fitness;
      return done;
    }
    if (auto cp = latest_checkpoint(run_dir / "checkpoints")) {
      state = from_checkpoint(config, checkpoint_from_json(read_json_file(*cp)));
      resumed = true;
    }
  }
  if (!resumed) {
    prepare_fresh_dir(run_dir);
    write_json_file(run_dir / "config.json", run_config_json(config));
    state = initial_state(config, seeds);
  }

  auto generations_csv = reopen_truncated(run_dir / "generations.csv", kGenerationColumns,
                                          state.generation);
  auto summary_csv = reopen_truncated(run_dir / "summary.csv", kSummaryColumns, state.generation);
  auto delta_csv = reopen_truncated(run_dir / "delta.csv", kDeltaColumns, state.generation);
  fs::remove(run_dir / "sensors_final.csv");
  std::ofstream timing(run_dir / "timing.log", resumed ? std::ios::app : std::ios::trunc);

  EvolutionResult result;
  result.generations_done = state.generation;
  for (std::size_t g = state.generation; g < evo.generations; ++g) {
    const auto t0 = std::chrono::steady_clock::now();
    const bool last = g + 1 == evo.generations;
    const bool delta_gen = is_delta_generation(evo, g);
    LifetimeOptions lopt;
    lopt.record_sensors = g == 0 || last || delta_gen;
    lopt.sensor_stride = evo.sensor_stride;
    const SeedTree life_seeds = seeds.path(stream::kLifetime, g);
    Rng evo_rng = seeds.path(stream::kEvolution, g).rng();

    LifetimeResult life;
    std::vector<double> fitness;
    EsGeneration es_gen;
    if (es) {
      const BatchObjective objective = [&](std::span<const Candidate> cands) {
        state.population.clear();
        for (const auto& c : cands) state.population.push_back(candidate_to_genome(state.layout, c));
        life = run_lifetime(state.population, config.world, life_seeds, lopt);
        return life.fitness;
      };
      es_gen = run_es_generation(objective, state.distribution, evo_rng, config.es);
      state.lineage = es_gen.population.lineage;
      fitness = es_gen.fitness;
    } else {
      life = run_lifetime(state.population, config.world, life_seeds, lopt);
      fitness = life.fitness;
    }

    for (std::size_t i = 0; i < fitness.size(); ++i) {
      generations_csv->row(g, i, fitness[i], to_string(state.lineage[i]));
    }
    const auto summary = summarize(fitness);
    summary_csv->row(g, summary.best, summary.mean, summary.median);
    if (g == 0) {
      write_sensor_csv(run_dir / "sensors_gen0.csv", life.sensor_log);
      result.initial_fitness = fitness;
    }
    if (last) write_sensor_csv(run_dir / "sensors_final.csv", life.sensor_log);
    if (delta_gen) record_deltas(*delta_csv, config, g, state.population, fitness, life.sensor_log, seeds);
    generations_csv->flush();
    summary_csv->flush();
    delta_csv->flush();

    if (last) {
      json fin{{"schema", kPopulationSchema},
               {"version", kGenomeSchemaVersion},
               {"kind", "final"},
               {"generation", g},
               {"replicate", replicate},
               {"genomes", genomes_to_json(state.population)},
               {"fitness", fitness},
               {"lineage", lineage_to_json(state.lineage)}};
      write_json_file(run_dir / "final.json", fin);
      result.final_fitness = fitness;
      result.complete = true;
    } else if (es) {
      state.distribution = std::move(es_gen.next);
    } else {
      auto next = next_generation(state.population, fitness, evo_rng, config.ga);
      state.population = std::move(next.population);
      state.lineage = std::move(next.lineage);
    }
    state.generation = g + 1;
    result.generations_done = g + 1;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    timing << fmt::format("generation {} {:.3f}s\n", g, secs) << std::flush;

    if (!last && state.generation % config.checkpoint_interval == 0) {
      write_json_file(checkpoint_path(run_dir, state.generation), checkpoint_to_json(to_checkpoint(config, state)));
    }
    if (!last && options.stop_after && state.generation >= *options.stop_after) break;
  }
  return result;
}

// ---- other experiment kinds ------------------------------------------------

namespace {

fs::path make_run_dir(const fs::path& experiment_dir, const std::string& run_id,
                      const ExperimentConfig& config) {
  const fs::path dir = experiment_dir / run_id;
  prepare_fresh_dir(dir);
  write_json_file(dir / "config.json", run_config_json(config));
  return dir;
}

std::string run_id(std::size_t replicate) { return fmt::format("r{:03}", replicate); }

// Genome indices ordered by fitness, truncated to top_k (0 keeps all).
std::vector<std::size_t> top_indices(const std::vector<double>& fitness, std::size_t top_k) {
  auto order = descending_order(fitness);
  if (top_k > 0 && top_k < order.size()) order.resize(top_k);
  return order;
}

void run_criticality_scan(const ExperimentConfig& config, const fs::path& dir,
                          const RunOptions& options) {
  const fs::path src = config.source_run;
  const auto fin = load_final(src);
  std::optional<SensorDataset> data;
  if (config.criticality.sensor_mode == SensorMode::Clipped) {
    data = load_sensor_csv(src / "sensors_final.csv", SensorProvenance::FinalGeneration);
  }
  const auto grid = config.criticality.grid.values();
  CsvWriter curves(dir / "curves.csv", {"genome_id", "c_beta", "C_H"});
  CsvWriter summary(dir / "criticality.csv",
                    {"genome_id", "fitness", "c_beta_crit", "delta", "sensor_mode"});
  const SeedTree seeds(config.seed);
  for (const std::size_t id : top_indices(fin.fitness, config.criticality.top_k)) {
    const auto curve = heat_capacity_curve(
        fin.genomes[id], grid, config.criticality.sensor_mode, data ? &*data : nullptr,
        config.criticality.schedule, seeds.path(stream::kCriticality, id), options.threads,
        config.world.dynamics);
    for (std::size_t k = 0; k < grid.size(); ++k) curves.row(id, grid[k], curve.values[k]);
    summary.row(id, fin.fitness[id], curve.c_beta_crit, curve.delta,
                to_string(config.criticality.sensor_mode));
  }
}

void run_sensor_modes(const ExperimentConfig& config, const fs::path& dir,
                      const RunOptions& options) {
  const fs::path src = config.source_run;
  const auto fin = load_final(src);
  const auto gen0 = load_sensor_csv(src / "sensors_gen0.csv", SensorProvenance::Generation0);
  const auto last = load_sensor_csv(src / "sensors_final.csv", SensorProvenance::FinalGeneration);
  std::vector<IsingGenome> genomes;
  for (auto id : top_indices(fin.fitness, config.criticality.top_k)) genomes.push_back(fin.genomes[id]);
  const auto grid = config.criticality.grid.values();
  const auto cmp = compare_sensor_modes(genomes, gen0, last, grid, config.criticality.schedule,
                                        SeedTree(config.seed).child(stream::kCriticality),
                                        options.threads);
  CsvWriter out(dir / "sensor_modes.csv", {"c_beta", "thermalized", "generation0", "final"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.row(grid[k], cmp.thermalized[k], cmp.generation0[k], cmp.final_generation[k]);
  }
}

void run_scaling(const ExperimentConfig& config, const fs::path& dir, const RunOptions& options) {
  ScalingConfig sc;
  sc.sizes = config.scaling.sizes;
  sc.ensemble_size = config.scaling.ensemble_size;
  sc.n_sensor_vectors = config.scaling.n_sensor_vectors;
  sc.grid = config.criticality.grid.values();
  sc.schedule = config.criticality.schedule;
  const auto points = scaling_analysis(sc, SeedTree(config.seed), options.threads);
  CsvWriter curves(dir / "scaling.csv", {"n", "c_beta", "median_C_H"});
  CsvWriter peaks(dir / "scaling_peaks.csv", {"n", "member", "peak_c_beta", "peak_C_H"});
  CsvWriter summary(dir / "scaling_summary.csv", {"n", "median_peak", "peak_beta"});
  for (const auto& p : points) {
    for (std::size_t k = 0; k < p.grid.size(); ++k) curves.row(p.n, p.grid[k], p.median_curve[k]);
    for (std::size_t e = 0; e < p.curves.size(); ++e) {
      peaks.row(p.n, e, p.peak_betas[e], *std::max_element(p.curves[e].begin(), p.curves[e].end()));
    }
    summary.row(p.n, p.median_peak, p.peak_beta);
  }
}

void run_generalize(const ExperimentConfig& config, const fs::path& dir) {
  const fs::path src = config.source_run;
  const auto fin = load_final(src);
  const auto res = generalizability(fin.genomes, config.world, config.generalize.t_train,
                                    config.generalize.t_extend,
                                    SeedTree(config.seed).child(stream::kLifetime));
  CsvWriter out(dir / "generalizability.csv",
                {"population_id", "t_train", "t_extend", "energy_train", "energy_extend", "gamma",
                 "cluster"});
  out.row(src.filename().string(), res.t_train, res.t_extend, res.energy_train,
          res.energy_extend, res.gamma, res.gamma < 0.5 ? "overfit" : "stable");
}

void run_perturb(const ExperimentConfig& config, const fs::path& dir, const RunOptions& options) {
  const fs::path src = config.source_run;
  const auto fin = load_final(src);
  const auto sweep = perturbation_sweep(fin.genomes, config.world, config.perturb.f_grid,
                                        config.perturb.replicates, SeedTree(config.seed),
                                        options.threads);
  CsvWriter out(dir / "perturbation.csv", {"f_pert", "mean_fitness", "n_samples"});
  for (std::size_t k = 0; k < sweep.f_pert.size(); ++k) {
    out.row(sweep.f_pert[k], sweep.mean_fitness[k], sweep.samples[k].size());
  }
  CsvWriter fit_csv(dir / "perturbation_fit.csv",
                    {"alpha_fit", "intercept", "baseline", "n_excluded"});
  try {
    const auto fit = decay_exponent(sweep.f_pert, sweep.mean_fitness, config.perturb.fit_baseline);
    fit_csv.row(fit.slope, fit.intercept, config.perturb.fit_baseline, fit.excluded.size());
  } catch (const std::invalid_argument&) {
    fit_csv.row("nan", "nan", config.perturb.fit_baseline, sweep.f_pert.size());
  }
}

void run_benchmark(const ExperimentConfig& config, const fs::path& dir, const RunOptions& options) {
  const auto curves = run_comparison(config.benchmark, SeedTree(config.seed), options.threads);
  CsvWriter out(dir / "benchmark.csv",
                {"function", "algorithm", "run", "generation", "raw_loss", "normalized_loss"});
  CsvWriter bands(dir / "benchmark_bands.csv",
                  {"function", "algorithm", "generation", "p25", "p50", "p75"});
  for (const auto& c : curves) {
    const auto fn = to_string(c.function);
    const auto alg = to_string(c.optimizer);
    for (std::size_t r = 0; r < c.raw.size(); ++r) {
      for (std::size_t g = 0; g < c.raw[r].size(); ++g) {
        out.row(fn, alg, r, g, c.raw[r][g], c.normalized[r][g]);
      }
    }
    for (std::size_t g = 0; g < c.p50.size(); ++g) bands.row(fn, alg, g, c.p25[g], c.p50[g], c.p75[g]);
  }
}

void run_thermalization_sweep(const ExperimentConfig& config, const fs::path& experiment_dir,
                              const RunOptions& options) {
  struct Job {
    int steps;
    std::size_t replicate;
  };
  std::vector<Job> jobs;
  for (int t : config.thermalization_sweep.settings) {
    for (std::size_t r = 0; r < config.thermalization_sweep.replicates; ++r) jobs.push_back({t, r});
  }
  std::vector<std::vector<std::vector<std::string>>> rows(jobs.size());
  parallel_for(jobs.size(), options.threads, [&](std::size_t k) {
    ExperimentConfig c = config;
    c.kind = ExperimentKind::EvolveGA;
    c.world.thermalization_steps = jobs[k].steps;
    c.world.task = Task::Simple;
    const auto dir = experiment_dir / fmt::format("t{:02}_r{:03}", jobs[k].steps, jobs[k].replicate);
    RunOptions sub = options;
    sub.threads = 1;
    run_evolution(c, jobs[k].replicate, dir, sub);
    const auto table = read_csv(dir / "summary.csv");
    for (const auto& row : table.rows) {
      std::vector<std::string> out{std::to_string(jobs[k].steps), std::to_string(jobs[k].replicate)};
      out.insert(out.end(), row.begin(), row.end());
      rows[k].push_back(std::move(out));
    }
  });
  CsvWriter out(experiment_dir / "thermalization.csv",
                {"thermalization", "replicate", "generation", "best", "mean", "median"});
  for (const auto& job_rows : rows) {
    for (const auto& row : job_rows) out.write_row(row);
  }
}

void run_delta_distribution(const ExperimentConfig& config, const fs::path& dir,
                            const RunOptions& options) {
  const auto& dd = config.delta_distribution;
  const auto grid = config.criticality.grid.values();
  CsvWriter out(dir / "delta_distribution.csv", {"task", "run", "mean_delta"});
  std::vector<double> samples[2];
  const std::vector<std::string>* runs[2] = {&dd.simple_runs, &dd.hard_runs};
  const char* names[2] = {"simple", "hard"};
  for (std::size_t t = 0; t < 2; ++t) {
    for (std::size_t i = 0; i < runs[t]->size(); ++i) {
      const fs::path src = (*runs[t])[i];
      const auto fin = load_final(src);
      if (fin.genomes.size() < dd.top_k) {
        throw ConfigError(fmt::format("{} has {} agents, top_k is {}", src.string(),
                                      fin.genomes.size(), dd.top_k));
      }
      const auto data = load_sensor_csv(src / "sensors_final.csv", SensorProvenance::FinalGeneration);
      std::vector<double> deltas(fin.genomes.size(), 0.0);
      const auto top = top_indices(fin.fitness, dd.top_k);
      for (auto id : top) {
        deltas[id] = heat_capacity_curve(fin.genomes[id], grid, config.criticality.sensor_mode,
                                         &data, config.criticality.schedule,
                                         SeedTree(config.seed).path(stream::kCriticality, t, i, id),
                                         options.threads, config.world.dynamics)
                         .delta;
      }
      const double m = top_k_mean(fin.fitness, deltas, dd.top_k);
      samples[t].push_back(m);
      out.row(names[t], src.string(), m);
    }
  }
  const auto test = mann_whitney_u(samples[1], samples[0], Alternative::Greater);
  CsvWriter mw(dir / "mann_whitney.csv", {"n_simple", "n_hard", "U", "p", "exact"});
  mw.row(samples[0].size(), samples[1].size(), test.u, test.p, test.exact ? 1 : 0);
}

}  // namespace

std::filesystem::path run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const fs::path experiment_dir = options.output_root / config.name;
  fs::create_directories(experiment_dir);
  switch (config.kind) {
    case ExperimentKind::EvolveGA:
    case ExperimentKind::EvolveES: {
      parallel_for(config.n_replicates, options.threads, [&](std::size_t r) {
        RunOptions sub = options;
        sub.threads = 1;
        run_evolution(config, r, experiment_dir / run_id(r), sub);
      });
      break;
    }
    case ExperimentKind::ThermalizationSweep:
      run_thermalization_sweep(config, experiment_dir, options);
      break;
    case ExperimentKind::CriticalityScan:
      run_criticality_scan(config, make_run_dir(experiment_dir, run_id(0), config), options);
      break;
    case ExperimentKind::SensorModes:
      run_sensor_modes(config, make_run_dir(experiment_dir, run_id(0), config), options);
      break;
    case ExperimentKind::Scaling:
      run_scaling(config, make_run_dir(experiment_dir, run_id(0), config), options);
      break;
    case ExperimentKind::Generalize:
      run_generalize(config, make_run_dir(experiment_dir, run_id(0), config));
      break;
    case ExperimentKind::Perturb:
      run_perturb(config, make_run_dir(experiment_dir, run_id(0), config), options);
      break;
    case ExperimentKind::Benchmark:
      run_benchmark(config, make_run_dir(experiment_dir, run_id(0), config), options);
      break;
    case ExperimentKind::DeltaDistribution:
      run_delta_distribution(config, make_run_dir(experiment_dir, run_id(0), config), options);
      break;
  }
  return experiment_dir;
}

ReplayResult replay_run(const std::filesystem::path& run_dir) {
  const auto config = config_from_json(read_json_file(run_dir / "config.json"));
  const auto fin = load_final(run_dir);
  const SeedTree seeds = replicate_seeds(config.seed, fin.replicate);
  LifetimeOptions lopt;
  lopt.record_traces = true;
  const auto life = run_lifetime(fin.genomes, config.world,
                                 seeds.path(stream::kLifetime, fin.generation), lopt);
  const fs::path dir = run_dir / "replay";
  fs::create_directories(dir);
  CsvWriter trace(dir / "trace.csv", {"step", "agent_id", "energy", "speed", "ate"});
  for (std::size_t i = 0; i < life.traces.size(); ++i) {
    const auto& t = life.traces[i];
    for (std::size_t s = 0; s < t.energy.size(); ++s) {
      trace.row(s + 1, i, t.energy[s], t.speed[s], static_cast<int>(t.ate[s]));
    }
  }
  CsvWriter fit(dir / "fitness.csv", {"agent_id", "logged_fitness", "replayed_fitness"});
  ReplayResult res;
  res.logged = fin.fitness;
  res.replayed = life.fitness;
  for (std::size_t i = 0; i < fin.fitness.size(); ++i) fit.row(i, fin.fitness[i], life.fitness[i]);
  res.matches = res.logged == res.replayed;
  return res;
}

}  // namespace isingevo
