// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Criterion names given on the command line
// restrict the run to those criteria.

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "isingevo/analysis.hpp"
#include "isingevo/benchmarks.hpp"
#include "isingevo/config.hpp"
#include "isingevo/criticality.hpp"
#include "isingevo/csv.hpp"
#include "isingevo/experiment.hpp"
#include "isingevo/ga.hpp"
#include "isingevo/ising.hpp"
#include "isingevo/stats.hpp"
#include "oracles.hpp"

using namespace isingevo;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  /// Wall-clock limit in seconds; zero means none.
  double time_limit = 0.0;
  std::function<Outcome()> run;
};

std::string g_run_label = "all";

fs::path work_root() {
  static const fs::path root = [] {
    auto p = fs::temp_directory_path() / "isingevo_acceptance" / g_run_label;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> column_values(const CsvTable& t, const std::string& name) {
  const auto c = t.column(name);
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) out.push_back(std::stod(row[c]));
  return out;
}

std::vector<double> uniform_vector(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// ---- Boltzmann stationarity -----------------------------------------------

Outcome boltzmann() {
  Rng rng(20240601);
  const auto g = random_genome(Topology::layered(4, 4, 4), 1.0, 0.5, 1.0, rng);
  const std::vector<double> sensors = uniform_vector(4, rng);
  const auto exact = oracle::enumerate_clamped(g, sensors, g.beta);

  NetworkState s = random_state(g.topology, rng);
  for (std::size_t k = 0; k < 4; ++k) s.spins[g.topology.sensors()[k]] = sensors[k];
  Network net(g);
  net.thermalize(s, 1000, rng);
  const std::size_t sweeps = 1000000;
  std::vector<double> counts(exact.probabilities.size(), 0.0);
  for (std::size_t k = 0; k < sweeps; ++k) {
    net.sweep(s, rng);
    std::size_t idx = 0;
    for (std::size_t b = 0; b < exact.free.size(); ++b) {
      if (s.spins[exact.free[b]] > 0) idx |= std::size_t{1} << b;
    }
    counts[idx] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t st = 0; st < counts.size(); ++st) {
    tv += std::abs(counts[st] / static_cast<double>(sweeps) - exact.probabilities[st]);
  }
  tv *= 0.5;
  return {tv <= 0.02, fmt::format("TV = {:.5f} over {} states, {} sweeps", tv, counts.size(), sweeps)};
}

// ---- heat capacity against enumeration -------------------------------------

Outcome heat_capacity_oracle() {
  // From the disordered side up to the heat-capacity peak of these genomes.
  // Past the peak, single-spin chains stay in one basin for longer than any
  // affordable measurement window.
  const auto grid = log_grid(0.1, 1.6, 10);
  AnnealingSchedule schedule;
  schedule.measurement_sweeps = 1000000;
  schedule.sensor_refresh = schedule.measurement_sweeps;
  double worst = 0.0;
  std::size_t failures = 0;
  for (std::uint64_t gi = 0; gi < 3; ++gi) {
    Rng rng(1000 + gi);
    const auto g = random_genome(Topology::layered(4, 4, 4), 1.0, 0.5, 1.0, rng);
    SensorDataset data(4, SensorProvenance::FinalGeneration);
    const auto sensors = uniform_vector(4, rng);
    data.add(sensors);
    const auto curve =
        heat_capacity_curve(g, grid, SensorMode::Clipped, &data, schedule, SeedTree(77 + gi));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double b = grid[k] * g.beta;
      const double exact = b * b * oracle::enumerate_clamped(g, sensors, b).variance;
      const double rel = std::abs(curve.values[k] - exact) / exact;
      worst = std::max(worst, rel);
      failures += rel > 0.05;
    }
  }
  return {failures == 0,
          fmt::format("worst relative error {:.4f} over 30 points, {} above 5%", worst, failures)};
}

// ---- delta regime for unevolved genomes ------------------------------------

Outcome delta_regime() {
  const auto grid = log_grid(1e-2, 1e2, 60);
  AnnealingSchedule schedule;
  SensorDataset data(4, SensorProvenance::Generation0);
  Rng data_rng(5);
  for (int k = 0; k < 100; ++k) data.add(uniform_vector(4, data_rng));

  bool pass = true;
  std::string detail;
  const std::vector<std::pair<double, double>> cases{{0.1, 1.0}, {1.0, 0.0}, {10.0, -1.0}};
  for (const auto& [beta_init, target] : cases) {
    std::vector<double> deltas;
    for (std::uint64_t gi = 0; gi < 50; ++gi) {
      Rng rng(SeedTree(31).path(gi).value());
      const auto g = random_genome(Topology::layered(4, 4, 4), beta_init, 0.5, 1.0, rng);
      deltas.push_back(
          heat_capacity_curve(g, grid, SensorMode::Clipped, &data, schedule, SeedTree(gi)).delta);
    }
    const double m = mean(deltas);
    pass = pass && std::abs(m - target) <= 0.3;
    detail += fmt::format("{}beta_init {}: mean delta {:+.3f} (target {:+.0f})",
                          detail.empty() ? "" : "; ", beta_init, m, target);
  }
  return {pass, detail};
}

// ---- finite-size scaling ---------------------------------------------------

Outcome scaling() {
  ScalingConfig config;
  const auto points = scaling_analysis(config, SeedTree(2024));
  bool increasing = true;
  bool in_range = true;
  std::string detail;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && !(points[i].median_peak > points[i - 1].median_peak)) increasing = false;
    if (points[i].peak_beta < 1.0 || points[i].peak_beta > 2.5) in_range = false;
    detail += fmt::format("{}N={}: peak C_H {:.4f} at beta {:.3f}", i ? "; " : "", points[i].n,
                          points[i].median_peak, points[i].peak_beta);
  }
  return {increasing && in_range, detail};
}

// ---- evolution runs --------------------------------------------------------

json evolution_json(const std::string& name, double beta_init, const std::string& task) {
  return json{{"kind", "evolve_ga"},
              {"name", name},
              {"seed", 1},
              {"n_replicates", 5},
              {"world", {{"lifespan", 500}, {"task", task}}},
              {"evolution", {{"generations", 300}, {"beta_init", beta_init}}}};
}

std::vector<std::vector<double>> run_median_series(const json& j) {
  RunOptions options;
  options.output_root = work_root() / "evolution";
  const auto config = config_from_json(j);
  const auto dir = run_experiment(config, options);
  std::vector<std::vector<double>> series;
  for (std::size_t r = 0; r < config.n_replicates; ++r) {
    series.push_back(column_values(
        read_csv(dir / fmt::format("r{:03d}", r) / "summary.csv"), "median"));
  }
  return series;
}

Outcome evolution_smoke() {
  const auto series = run_median_series(evolution_json("smoke", 1.0, "simple"));
  std::size_t ok = 0;
  std::string detail;
  for (const auto& s : series) {
    ok += s.back() > 2.0 && s.back() > s.front();
    detail += fmt::format("{}{:.2f}->{:.2f}", detail.empty() ? "" : ", ", s.front(), s.back());
  }
  return {ok >= 4, fmt::format("{}/5 seeds improved above 2 (gen0->final median: {})", ok, detail)};
}

Outcome subcritical_trap() {
  const auto series = run_median_series(evolution_json("trap", 10.0, "hard"));
  std::size_t ok = 0;
  std::string detail;
  for (const auto& s : series) {
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    ok += s.size() == 300 && *lo >= 1.95 && *hi <= 2.05;
    detail += fmt::format("{}[{:.3f}, {:.3f}]", detail.empty() ? "" : ", ", *lo, *hi);
  }
  return {ok >= 3, fmt::format("{}/5 seeds stayed in [1.95, 2.05] (median range: {})", ok, detail)};
}

// ---- benchmarks ------------------------------------------------------------

Outcome benchmark_claims() {
  ComparisonConfig config;
  config.generations = 2000;
  const auto curves = run_comparison(config, SeedTree(9));
  std::map<std::pair<BenchmarkKind, Optimizer>, const LossCurves*> by;
  for (const auto& c : curves) by[{c.function, c.optimizer}] = &c;

  auto median_hit = [&](Optimizer o) {
    std::vector<double> hits;
    for (const auto& run : by.at({BenchmarkKind::Sphere, o})->normalized) {
      hits.push_back(static_cast<double>(generations_to_threshold(run, 1e-2)));
    }
    return median(hits);
  };
  auto median_final = [&](BenchmarkKind k, Optimizer o, bool normalized) {
    const auto* c = by.at({k, o});
    std::vector<double> finals;
    for (const auto& run : normalized ? c->normalized : c->raw) finals.push_back(run.back());
    return median(finals);
  };

  const double es_hit = median_hit(Optimizer::ES);
  const double ga_hit = median_hit(Optimizer::GA);
  const double ga_ras = median_final(BenchmarkKind::Rastrigin, Optimizer::GA, true);
  const double es_ras = median_final(BenchmarkKind::Rastrigin, Optimizer::ES, true);
  double min_ros = std::numeric_limits<double>::infinity();
  for (Optimizer o : {Optimizer::GA, Optimizer::ES}) {
    for (const auto& run : by.at({BenchmarkKind::Rosenbrock, o})->raw) {
      min_ros = std::min(min_ros, run.back());
    }
  }
  const bool sphere = es_hit < ga_hit;
  const bool rastrigin = ga_ras < es_ras;
  const bool rosenbrock = min_ros > 0.0;
  return {sphere && rastrigin && rosenbrock,
          fmt::format("sphere median generations to 1e-2: ES {} vs GA {}; rastrigin median final "
                      "normalized loss: GA {:.4g} vs ES {:.4g}; smallest final rosenbrock loss {:.4g}",
                      es_hit, ga_hit, ga_ras, es_ras, min_ros)};
}

// ---- analysis oracles ------------------------------------------------------

Outcome analysis_oracles() {
  std::vector<std::string> failures;

  std::vector<double> trace(50000);
  for (std::size_t t = 0; t < trace.size(); ++t) trace[t] = 0.37 * static_cast<double>(t + 1);
  const double gamma = gamma_from_trace(trace, 2000, 50000);
  if (gamma != 1.0) failures.push_back(fmt::format("gamma {}", gamma));

  const auto grid = default_perturbation_grid();
  std::vector<double> worst_err;
  for (double planted : {-2.26, -5.03}) {
    std::vector<double> fitness;
    for (double f : grid) fitness.push_back(4.5 * std::exp(planted * f));
    const double slope = decay_exponent(grid, fitness).slope;
    if (std::abs(slope - planted) > 0.01) {
      failures.push_back(fmt::format("exponent {} recovered as {}", planted, slope));
    }
  }

  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, 5, 6};
  const auto mw = mann_whitney_u(a, b, Alternative::Less);
  if (!mw.exact || std::abs(mw.p - 0.05) > 1e-12) failures.push_back(fmt::format("MW p {}", mw.p));

  // GA composition over every generation logged by the smoke runs, or a
  // fresh short run when those are absent.
  fs::path smoke = work_root() / "evolution" / "smoke";
  if (!fs::exists(smoke)) {
    auto j = evolution_json("composition", 1.0, "simple");
    j["world"]["lifespan"] = 50;
    j["evolution"]["generations"] = 30;
    RunOptions options;
    options.output_root = work_root() / "evolution";
    smoke = run_experiment(config_from_json(j), options);
  }
  std::size_t checked = 0;
  for (const auto& entry : fs::directory_iterator(smoke)) {
    if (!entry.is_directory()) continue;
    const auto table = read_csv(entry.path() / "generations.csv");
    std::map<std::size_t, std::vector<LineageTag>> by_gen;
    for (const auto& row : table.rows) {
      by_gen[std::stoul(row[table.column("generation")])].push_back(
          lineage_from_string(row[table.column("lineage_op")]));
    }
    for (const auto& [gen, tags] : by_gen) {
      if (gen == 0) continue;
      const auto c = count_lineage(tags);
      ++checked;
      if (c.copy != 20 || c.mutate != 15 || c.mate != 15) {
        failures.push_back(fmt::format("generation {} of {} has {}/{}/{}", gen,
                                       entry.path().filename().string(), c.copy, c.mutate, c.mate));
      }
    }
  }
  if (checked == 0) failures.push_back("no bred generations logged");

  std::string detail = fmt::format("gamma {}, MW p {}, {} bred generations checked", gamma, mw.p, checked);
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

// ---- determinism -----------------------------------------------------------

std::map<std::string, std::string> csv_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files[fs::relative(entry.path(), root).string()] = slurp(entry.path());
    }
  }
  return files;
}

std::vector<json> determinism_configs(const fs::path& source) {
  const json schedule{{"measurement_sweeps", 200}, {"n_stages", 5}, {"sweeps_per_stage", 10}};
  const json small_world{{"lifespan", 60}};
  const json evolution{{"generations", 4}, {"delta_interval", 2}, {"delta_top_k", 2}};
  const json criticality{{"grid", {{"n", 8}}}, {"schedule", schedule}, {"top_k", 3}};
  const std::string src = source.string();
  return {
      {{"kind", "evolve_ga"}, {"name", "ga"}, {"world", small_world}, {"evolution", evolution},
       {"criticality", criticality}},
      {{"kind", "evolve_es"}, {"name", "es"}, {"world", small_world}, {"evolution", evolution},
       {"criticality", criticality}},
      {{"kind", "criticality_scan"}, {"name", "crit"}, {"source_run", src},
       {"criticality", criticality}},
      {{"kind", "sensor_modes"}, {"name", "modes"}, {"source_run", src},
       {"criticality", criticality}},
      {{"kind", "scaling"}, {"name", "scaling"},
       {"scaling", {{"sizes", {12, 25}}, {"ensemble_size", 3}, {"n_sensor_vectors", 5}}},
       {"criticality", criticality}},
      {{"kind", "generalize"}, {"name", "gen"}, {"source_run", src}, {"world", small_world},
       {"generalize", {{"t_train", 30}, {"t_extend", 90}}}},
      {{"kind", "perturb"}, {"name", "pert"}, {"source_run", src}, {"world", small_world},
       {"perturb", {{"replicates", 2}}}},
      {{"kind", "benchmark"}, {"name", "bench"},
       {"benchmark", {{"dim", 10}, {"n_runs", 3}, {"generations", 30}}}},
      {{"kind", "thermalization_sweep"}, {"name", "therm"}, {"world", {{"lifespan", 20}}},
       {"evolution", {{"generations", 2}}},
       {"thermalization_sweep", {{"settings", {1, 10}}, {"replicates", 2}}}},
      {{"kind", "delta_distribution"}, {"name", "dd"},
       {"delta_distribution", {{"simple_runs", {src}}, {"hard_runs", {src}}, {"top_k", 5}}}},
  };
}

Outcome determinism() {
  const auto base = work_root() / "determinism";
  RunOptions source_options;
  source_options.output_root = base / "source";
  auto source_json = determinism_configs("")[0];
  source_json["name"] = "source";
  const auto source = run_experiment(config_from_json(source_json), source_options) / "r000";

  std::vector<std::string> mismatches;
  std::size_t compared = 0;
  for (const auto& j : determinism_configs(source)) {
    const auto config = config_from_json(j);
    std::map<std::string, std::string> trees[2];
    for (int pass = 0; pass < 2; ++pass) {
      RunOptions options;
      options.output_root = base / fmt::format("pass{}", pass);
      trees[pass] = csv_tree(run_experiment(config, options));
    }
    if (trees[0].empty() || trees[0] != trees[1]) {
      mismatches.push_back(config.name);
    }
    compared += trees[0].size();
  }
  std::string detail = fmt::format("{} CSV files across 10 experiment kinds compared", compared);
  if (!mismatches.empty()) {
    detail += "; differing:";
    for (const auto& m : mismatches) detail += " " + m;
  }
  return {mismatches.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"boltzmann_stationarity", 120, boltzmann},
      {"heat_capacity_oracle", 300, heat_capacity_oracle},
      {"delta_regime", 1200, delta_regime},
      {"scaling", 3600, scaling},
      {"evolution_smoke", 1800, evolution_smoke},
      {"subcritical_trap", 0, subcritical_trap},
      {"benchmark_claims", 1800, benchmark_claims},
      {"analysis_oracles", 0, analysis_oracles},
      {"determinism", 0, determinism},
  };
  const std::set<std::string> selected(argv + 1, argv + argc);
  if (!selected.empty()) {
    g_run_label.clear();
    for (const auto& name : selected) g_run_label += (g_run_label.empty() ? "" : "+") + name;
  }
  for (const auto& name : selected) {
    if (std::none_of(criteria.begin(), criteria.end(),
                     [&](const Criterion& c) { return c.name == name; })) {
      fmt::print(stderr, "unknown criterion '{}'\n", name);
      return 2;
    }
  }

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.name)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("exception: {}", e.what())};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = outcome.pass;
    std::string timing = fmt::format("{:.1f} s", seconds);
    if (c.time_limit > 0.0) {
      timing += fmt::format(" (limit {:.0f} s)", c.time_limit);
      if (seconds > c.time_limit) pass = false;
    }
    failed += !pass;
    fmt::print("{} {}: {} [{}]\n", pass ? "PASS" : "FAIL", c.name, outcome.detail, timing);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
