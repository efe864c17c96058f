#include "isingevo/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>

namespace isingevo {

namespace {

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::EvolveGA, "evolve_ga"},
    {ExperimentKind::EvolveES, "evolve_es"},
    {ExperimentKind::CriticalityScan, "criticality_scan"},
    {ExperimentKind::Scaling, "scaling"},
    {ExperimentKind::SensorModes, "sensor_modes"},
    {ExperimentKind::Generalize, "generalize"},
    {ExperimentKind::Perturb, "perturb"},
    {ExperimentKind::Benchmark, "benchmark"},
    {ExperimentKind::ThermalizationSweep, "thermalization_sweep"},
    {ExperimentKind::DeltaDistribution, "delta_distribution"},
};

using nlohmann::json;

// Text conversions for the enum-valued fields.
std::string encode(Task t) { return to_string(t); }
std::string encode(SensorMode m) { return to_string(m); }
std::string encode(BenchmarkKind k) { return to_string(k); }
std::string encode(Dynamics d) { return d == Dynamics::Glauber ? "glauber" : "metropolis"; }

void decode(const std::string& s, Task& t) { t = task_from_string(s); }
void decode(const std::string& s, BenchmarkKind& k) { k = benchmark_from_string(s); }
void decode(const std::string& s, SensorMode& m) {
  if (s == "clipped") {
    m = SensorMode::Clipped;
  } else if (s == "thermalized") {
    m = SensorMode::Thermalized;
  } else {
    throw std::invalid_argument(fmt::format("unknown sensor mode '{}'", s));
  }
}
void decode(const std::string& s, Dynamics& d) {
  if (s == "glauber") {
    d = Dynamics::Glauber;
  } else if (s == "metropolis") {
    d = Dynamics::Metropolis;
  } else {
    throw std::invalid_argument(fmt::format("unknown dynamics '{}'", s));
  }
}

template <class T>
concept Encodable = requires(T v) { encode(v); };

// Reads fields out of a JSON object, remembering which keys were used so
// that leftovers can be reported.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(fmt::format("{} must be an object", label()));
  }

  template <class T>
  void operator()(const char* key, T& field) {
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    seen_.insert(key);
    const std::string where = path_.empty() ? key : path_ + "." + key;
    try {
      read(*it, field);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("{}: {}", where, e.what()));
    }
  }

  template <class Fn>
  void section(const char* key, Fn&& fn) {
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    seen_.insert(key);
    Reader sub(*it, path_.empty() ? key : path_ + "." + key);
    fn(sub);
    sub.finish();
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError(fmt::format("unknown key '{}' in {}", item.key(), label()));
      }
    }
  }

 private:
  std::string label() const { return path_.empty() ? "config" : path_; }

  static void read(const json& v, double& out) {
    if (v.is_string() && v.get<std::string>() == "inf") {
      out = std::numeric_limits<double>::infinity();
      return;
    }
    if (!v.is_number()) throw std::invalid_argument("expected a number");
    out = v.get<double>();
  }
  static void read(const json& v, bool& out) {
    if (!v.is_boolean()) throw std::invalid_argument("expected true or false");
    out = v.get<bool>();
  }
  static void read(const json& v, std::string& out) {
    if (!v.is_string()) throw std::invalid_argument("expected a string");
    out = v.get<std::string>();
  }
  template <class T>
    requires std::is_integral_v<T>
  static void read(const json& v, T& out) {
    if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
    if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() &&
        v.get<long long>() < 0) {
      throw std::invalid_argument("expected a non-negative integer");
    }
    out = v.get<T>();
  }
  template <Encodable T>
  static void read(const json& v, T& out) {
    if (!v.is_string()) throw std::invalid_argument("expected a string");
    decode(v.get<std::string>(), out);
  }
  template <class T>
  static void read(const json& v, std::vector<T>& out) {
    if (!v.is_array()) throw std::invalid_argument("expected an array");
    out.clear();
    for (const auto& item : v) {
      T x{};
      read(item, x);
      out.push_back(x);
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

class Writer {
 public:
  explicit Writer(json& j) : j_(j) { j_ = json::object(); }

  template <class T>
  void operator()(const char* key, const T& field) {
    j_[key] = write(field);
  }

  template <class Fn>
  void section(const char* key, Fn&& fn) {
    Writer sub(j_[key]);
    fn(sub);
  }

 private:
  static json write(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return v;
  }
  template <class T>
    requires(std::is_arithmetic_v<T> || std::is_same_v<T, std::string>)
  static json write(const T& v) {
    return v;
  }
  template <Encodable T>
  static json write(const T& v) {
    return encode(v);
  }
  template <class T>
  static json write(const std::vector<T>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(write(x));
    return a;
  }

  json& j_;
};

template <class V, class C>
void visit_world(V& v, C& w) {
  v("world_size", w.world_size);
  v("n_agents", w.n_agents);
  v("n_food", w.n_food);
  v("lifespan", w.lifespan);
  v("e_init", w.e_init);
  v("task", w.task);
  v("v_thresh", w.v_thresh);
  v("eat_radius", w.eat_radius);
  v("food_energy", w.food_energy);
  v("move_cost_coeff", w.move_cost_coeff);
  v("a_lin", w.a_lin);
  v("a_rot", w.a_rot);
  v("v_max", w.v_max);
  v("drag", w.drag);
  v("energy_scale", w.energy_scale);
  v("thermalization_steps", w.thermalization_steps);
  v("dynamics", w.dynamics.rule);
  v("legacy_sign", w.dynamics.legacy_sign);
}

template <class V, class C>
void visit_ga(V& v, C& g) {
  v("n_elite", g.n_elite);
  v("n_mutants", g.n_mutants);
  v("n_mated", g.n_mated);
  v("n_duplicated", g.n_duplicated);
  v("mutation_prob", g.mutation_prob);
  v("beta_noise_sigma", g.beta_noise_sigma);
  v("edge_flip_prob", g.edge_flip_prob);
  v("weight_bound", g.weight_bound);
}

template <class V, class C>
void visit_es(V& v, C& e) {
  v("alpha", e.alpha);
  v("sigma", e.sigma);
  v("sigma_beta_ratio", e.sigma_beta_ratio);
  v("population", e.population);
  v("n_elite", e.n_elite);
  v("sparsity", e.sparsity);
  v("bound", e.bound);
  v("evolve_beta", e.evolve_beta);
  v("beta_floor", e.beta_floor);
}

template <class V, class C>
void visit_schedule(V& v, C& s) {
  v("start_scale", s.start_scale);
  v("n_stages", s.n_stages);
  v("sweeps_per_stage", s.sweeps_per_stage);
  v("measurement_sweeps", s.measurement_sweeps);
  v("burn_in", s.burn_in);
  v("anneal_each_refresh", s.anneal_each_refresh);
  v("sensor_refresh", s.sensor_refresh);
}

template <class V, class C>
void visit_config(V& v, C& c) {
  v("name", c.name);
  v("seed", c.seed);
  v("n_replicates", c.n_replicates);
  v("output_dir", c.output_dir);
  v("checkpoint_interval", c.checkpoint_interval);
  v("source_run", c.source_run);
  v.section("world", [&](auto& s) { visit_world(s, c.world); });
  v.section("ga", [&](auto& s) { visit_ga(s, c.ga); });
  v.section("es", [&](auto& s) { visit_es(s, c.es); });
  v.section("evolution", [&](auto& s) {
    auto& e = c.evolution;
    s("generations", e.generations);
    s("beta_init", e.beta_init);
    s("n_hidden", e.n_hidden);
    s("edge_density", e.edge_density);
    s("weight_range", e.weight_range);
    s("delta_interval", e.delta_interval);
    s("delta_top_k", e.delta_top_k);
    s("sensor_stride", e.sensor_stride);
  });
  v.section("criticality", [&](auto& s) {
    auto& cr = c.criticality;
    s.section("grid", [&](auto& g) {
      g("lo", cr.grid.lo);
      g("hi", cr.grid.hi);
      g("n", cr.grid.n);
    });
    s.section("schedule", [&](auto& sc) { visit_schedule(sc, cr.schedule); });
    s("sensor_mode", cr.sensor_mode);
    s("top_k", cr.top_k);
  });
  v.section("scaling", [&](auto& s) {
    s("sizes", c.scaling.sizes);
    s("ensemble_size", c.scaling.ensemble_size);
    s("n_sensor_vectors", c.scaling.n_sensor_vectors);
  });
  v.section("generalize", [&](auto& s) {
    s("t_train", c.generalize.t_train);
    s("t_extend", c.generalize.t_extend);
  });
  v.section("perturb", [&](auto& s) {
    s("f_grid", c.perturb.f_grid);
    s("replicates", c.perturb.replicates);
    s("fit_baseline", c.perturb.fit_baseline);
  });
  v.section("benchmark", [&](auto& s) {
    auto& b = c.benchmark;
    s("functions", b.functions);
    s("dim", b.dim);
    s("n_runs", b.n_runs);
    s("generations", b.generations);
    s("init_sd", b.init_sd);
    s.section("ga", [&](auto& g) { visit_ga(g, b.ga); });
    s.section("es", [&](auto& e) { visit_es(e, b.es); });
  });
  v.section("thermalization_sweep", [&](auto& s) {
    s("settings", c.thermalization_sweep.settings);
    s("replicates", c.thermalization_sweep.replicates);
  });
  v.section("delta_distribution", [&](auto& s) {
    s("simple_runs", c.delta_distribution.simple_runs);
    s("hard_runs", c.delta_distribution.hard_runs);
    s("top_k", c.delta_distribution.top_k);
  });
}

bool is_evolution(ExperimentKind k) {
  return k == ExperimentKind::EvolveGA || k == ExperimentKind::EvolveES;
}

bool needs_source_run(ExperimentKind k) {
  return k == ExperimentKind::CriticalityScan || k == ExperimentKind::SensorModes ||
         k == ExperimentKind::Generalize || k == ExperimentKind::Perturb;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames) {
    if (name == n) return k;
  }
  throw ConfigError(fmt::format("unknown experiment kind '{}'", name));
}

void ExperimentConfig::validate() const {
  try {
    if (name.empty() || name.find_first_of("/\\") != std::string::npos || name == "." ||
        name == "..") {
      throw std::invalid_argument("name must be a plain directory name");
    }
    if (n_replicates == 0) throw std::invalid_argument("n_replicates must be positive");
    if (checkpoint_interval == 0) throw std::invalid_argument("checkpoint_interval must be positive");
    world.validate();
    ga.validate();
    es.validate();
    if (is_evolution(kind) || kind == ExperimentKind::ThermalizationSweep) {
      const auto& e = evolution;
      if (e.generations == 0) throw std::invalid_argument("evolution.generations must be positive");
      if (!(e.beta_init > 0.0)) throw std::invalid_argument("evolution.beta_init must be positive");
      if (!(e.edge_density >= 0.0 && e.edge_density <= 1.0)) {
        throw std::invalid_argument("evolution.edge_density must be in [0, 1]");
      }
      if (!(e.weight_range >= 0.0 && e.weight_range <= kWeightBound)) {
        throw std::invalid_argument("evolution.weight_range must be in [0, 2]");
      }
      if (e.sensor_stride == 0) throw std::invalid_argument("evolution.sensor_stride must be positive");
      if (e.delta_interval > 0 && e.delta_top_k == 0) {
        throw std::invalid_argument("evolution.delta_top_k must be positive");
      }
      const std::size_t pop =
          kind == ExperimentKind::EvolveES ? es.population : ga.population_size();
      if (world.n_agents != pop) {
        throw std::invalid_argument(fmt::format(
            "world.n_agents ({}) must equal the population size ({})", world.n_agents, pop));
      }
      if (e.delta_interval > 0 && e.delta_top_k > pop) {
        throw std::invalid_argument("evolution.delta_top_k exceeds the population");
      }
    }
    (void)criticality.grid.values();
    criticality.schedule.validate();
    if (kind == ExperimentKind::Scaling) {
      if (scaling.sizes.empty()) throw std::invalid_argument("scaling.sizes must not be empty");
      if (scaling.ensemble_size == 0 || scaling.n_sensor_vectors == 0) {
        throw std::invalid_argument("scaling ensemble and sensor counts must be positive");
      }
    }
    if (kind == ExperimentKind::Generalize &&
        (generalize.t_train == 0 || generalize.t_extend == 0)) {
      throw std::invalid_argument("generalize horizons must be positive");
    }
    if (kind == ExperimentKind::Perturb) {
      if (perturb.f_grid.empty() || perturb.replicates == 0) {
        throw std::invalid_argument("perturb needs a non-empty f_grid and replicates");
      }
      for (double f : perturb.f_grid) {
        if (!(f >= 0.0)) throw std::invalid_argument("perturb.f_grid entries must be >= 0");
      }
    }
    if (kind == ExperimentKind::Benchmark) benchmark.validate();
    if (kind == ExperimentKind::ThermalizationSweep) {
      if (thermalization_sweep.settings.empty() || thermalization_sweep.replicates == 0) {
        throw std::invalid_argument("thermalization_sweep needs settings and replicates");
      }
      for (int t : thermalization_sweep.settings) {
        if (t < 1) throw std::invalid_argument("thermalization settings must be >= 1");
      }
    }
    if (kind == ExperimentKind::DeltaDistribution) {
      if (delta_distribution.simple_runs.empty() || delta_distribution.hard_runs.empty()) {
        throw std::invalid_argument("delta_distribution needs simple_runs and hard_runs");
      }
      if (delta_distribution.top_k == 0) throw std::invalid_argument("delta_distribution.top_k must be positive");
    }
    if (needs_source_run(kind) && source_run.empty()) {
      throw std::invalid_argument(fmt::format("{} needs source_run", to_string(kind)));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (const auto it = j.find("kind"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("kind must be a string");
    c.kind = experiment_kind_from_string(it->get<std::string>());
  }
  // The world population follows the optimizer unless set explicitly.
  const bool explicit_agents = j.contains("world") && j["world"].is_object() &&
                               j["world"].contains("n_agents");
  json rest = j;
  rest.erase("kind");
  Reader r(rest, "");
  visit_config(r, c);
  r.finish();
  if (!explicit_agents) {
    c.world.n_agents = c.kind == ExperimentKind::EvolveES ? c.es.population
                                                          : c.ga.population_size();
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  json j;
  Writer w(j);
  visit_config(w, config);
  j["kind"] = to_string(config.kind);
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return config_from_json(j);
}

}  // namespace isingevo
