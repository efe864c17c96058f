#include "isingevo/criticality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "isingevo/parallel.hpp"
#include "isingevo/stats.hpp"

namespace isingevo {

std::string to_string(SensorProvenance p) {
  switch (p) {
    case SensorProvenance::Generation0: return "generation0";
    case SensorProvenance::FinalGeneration: return "final";
    case SensorProvenance::Thermalized: return "thermalized";
  }
  return "?";
}

std::string to_string(SensorMode m) {
  return m == SensorMode::Thermalized ? "thermalized" : "clipped";
}

SensorDataset::SensorDataset(std::size_t dim, SensorProvenance provenance)
    : dim_(dim), provenance_(provenance) {
  if (dim == 0) throw std::invalid_argument("sensor dataset dimension must be positive");
}

SensorDataset SensorDataset::from_log(std::span<const SensorRecord> log,
                                      SensorProvenance provenance) {
  SensorDataset data(4, provenance);
  for (const auto& rec : log) {
    const auto v = rec.reading.values();
    data.add(v);
  }
  return data;
}

void SensorDataset::add(std::span<const double> sample) {
  if (sample.size() != dim_) {
    throw std::invalid_argument(
        fmt::format("sensor sample has {} entries, dataset expects {}", sample.size(), dim_));
  }
  for (double x : sample) {
    if (!(x >= -1.0 && x <= 1.0)) {
      throw std::invalid_argument(fmt::format("sensor value {} outside [-1, 1]", x));
    }
  }
  values_.insert(values_.end(), sample.begin(), sample.end());
}

void AnnealingSchedule::validate() const {
  if (!(start_scale >= 1.0)) throw std::invalid_argument("schedule.start_scale must be >= 1");
  if (n_stages == 0) throw std::invalid_argument("schedule.n_stages must be positive");
  if (measurement_sweeps < 2) {
    throw std::invalid_argument("schedule.measurement_sweeps must be at least 2");
  }
  if (sensor_refresh < 2) throw std::invalid_argument("schedule.sensor_refresh must be at least 2");
}

namespace {

void clamp_sensors(NetworkState& state, const Topology& topo, std::span<const double> values) {
  const auto sensors = topo.sensors();
  for (std::size_t k = 0; k < sensors.size(); ++k) state.spins[sensors[k]] = values[k];
}

// Welford accumulator for one measurement block.
struct Block {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
};

}  // namespace

EnergyMoments estimate_var_energy(const IsingGenome& genome, double c_beta, SensorMode mode,
                                  const SensorDataset* data, const AnnealingSchedule& schedule,
                                  Rng& rng, DynamicsOptions dynamics) {
  schedule.validate();
  if (!(c_beta > 0.0)) throw std::invalid_argument("c_beta must be positive");
  const auto& topo = genome.topology;
  const bool clipped = mode == SensorMode::Clipped;
  if (clipped) {
    if (data == nullptr || data->empty()) {
      throw std::invalid_argument("clipped sensor mode needs a non-empty sensor dataset");
    }
    if (data->dim() != topo.sensors().size()) {
      throw std::invalid_argument("sensor dataset dimension does not match the genome");
    }
  }

  Network net(genome, dynamics, !clipped);
  NetworkState state = random_state(topo, rng);
  if (clipped) {
    clamp_sensors(state, topo, data->sample(rng.index(data->size())));
  } else {
    for (auto i : topo.sensors()) state.spins[i] = rng.sign();
  }

  const double target = c_beta * genome.beta;
  auto anneal = [&] {
    for (std::size_t k = 0; k < schedule.n_stages; ++k) {
      const double frac = schedule.n_stages == 1
                              ? 1.0
                              : static_cast<double>(k) / static_cast<double>(schedule.n_stages - 1);
      net.set_beta(target * std::pow(schedule.start_scale, frac - 1.0));
      net.thermalize(state, static_cast<int>(schedule.sweeps_per_stage), rng);
    }
    net.set_beta(target);
    net.thermalize(state, static_cast<int>(schedule.burn_in), rng);
  };
  anneal();

  std::vector<Block> blocks(1);
  double total = 0.0;
  for (std::size_t m = 0; m < schedule.measurement_sweeps; ++m) {
    if (clipped && m > 0 && m % schedule.sensor_refresh == 0) {
      clamp_sensors(state, topo, data->sample(rng.index(data->size())));
      if (schedule.anneal_each_refresh) {
        anneal();
      } else {
        net.thermalize(state, static_cast<int>(schedule.burn_in), rng);
      }
      blocks.emplace_back();
    }
    net.sweep(state, rng);
    const double e = net.energy(state.spins);
    blocks.back().add(e);
    total += e;
  }

  EnergyMoments out;
  out.mean = total / static_cast<double>(schedule.measurement_sweeps);
  double pooled = 0.0;
  for (const auto& b : blocks) pooled += b.m2;
  out.variance = pooled / static_cast<double>(schedule.measurement_sweeps);
  return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) {
    throw std::invalid_argument("log_grid needs 0 < lo < hi and at least two points");
  }
  std::vector<double> g(n);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::size_t argmax_first(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of empty sequence");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return best;
}

HeatCapacityCurve heat_capacity_curve(const IsingGenome& genome, std::span<const double> grid,
                                      SensorMode mode, const SensorDataset* data,
                                      const AnnealingSchedule& schedule, const SeedTree& seeds,
                                      std::size_t threads, DynamicsOptions dynamics) {
  if (grid.empty()) throw std::invalid_argument("empty c_beta grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0) || (k > 0 && !(grid[k] > grid[k - 1]))) {
      throw std::invalid_argument("c_beta grid must be positive and strictly ascending");
    }
  }
  HeatCapacityCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.assign(grid.size(), 0.0);
  parallel_for(grid.size(), threads, [&](std::size_t k) {
    Rng rng = seeds.child(k).rng();
    const auto moments = estimate_var_energy(genome, grid[k], mode, data, schedule, rng, dynamics);
    const double b = grid[k] * genome.beta;
    curve.values[k] = b * b * moments.variance;
  });
  curve.c_beta_crit = curve.grid[argmax_first(curve.values)];
  curve.delta = std::log10(curve.c_beta_crit);
  return curve;
}

IsingGenome scaling_genome(std::size_t n, Rng& rng) {
  if (n < 3) throw std::invalid_argument("scaling networks need at least 3 neurons");
  const std::size_t n_sensors = n / 3;
  const std::size_t n_motors = n / 3;
  const Topology topo = Topology::layered(n_sensors, n - n_sensors - n_motors, n_motors);
  IsingGenome g = random_genome(topo, 1.0, 1.0, 1.0, rng);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double k = (g.edge(i, j) ? g.weight(i, j) : 0.0) + (g.edge(j, i) ? g.weight(j, i) : 0.0);
      norm2 += k * k;
    }
  }
  const double scale = std::sqrt(static_cast<double>(n)) / std::sqrt(norm2);
  for (auto& w : g.weights) w *= scale;
  return g;
}

std::vector<ScalingPoint> scaling_analysis(const ScalingConfig& config, const SeedTree& seeds,
                                           std::size_t threads) {
  if (config.ensemble_size == 0) throw std::invalid_argument("ensemble_size must be positive");
  std::vector<ScalingPoint> out;
  for (std::size_t s = 0; s < config.sizes.size(); ++s) {
    const std::size_t n = config.sizes[s];
    const SeedTree size_seeds = seeds.child(n);
    ScalingPoint point;
    point.n = n;
    point.grid = config.grid;
    point.curves.resize(config.ensemble_size);
    point.peak_betas.resize(config.ensemble_size);
    std::vector<double> peaks(config.ensemble_size);
    // Fan out over grid points inside each curve so that the ensemble order
    // (and therefore the output) is fixed.
    for (std::size_t e = 0; e < config.ensemble_size; ++e) {
      Rng rng = size_seeds.path(stream::kInit, e).rng();
      const IsingGenome g = scaling_genome(n, rng);
      SensorDataset data(g.topology.sensors().size(), SensorProvenance::Thermalized);
      std::vector<double> v(data.dim());
      for (std::size_t k = 0; k < config.n_sensor_vectors; ++k) {
        for (auto& x : v) x = rng.uniform(-1.0, 1.0);
        data.add(v);
      }
      auto curve = heat_capacity_curve(g, config.grid, SensorMode::Clipped, &data, config.schedule,
                                       size_seeds.path(stream::kCriticality, e), threads);
      peaks[e] = *std::max_element(curve.values.begin(), curve.values.end());
      point.peak_betas[e] = curve.c_beta_crit;
      point.curves[e] = std::move(curve.values);
    }
    point.median_curve.resize(config.grid.size());
    std::vector<double> column(config.ensemble_size);
    for (std::size_t k = 0; k < config.grid.size(); ++k) {
      for (std::size_t e = 0; e < config.ensemble_size; ++e) column[e] = point.curves[e][k];
      point.median_curve[k] = median(column);
    }
    point.median_peak = median(peaks);
    point.peak_beta = config.grid[argmax_first(point.median_curve)];
    out.push_back(std::move(point));
  }
  return out;
}

SensorModeComparison compare_sensor_modes(std::span<const IsingGenome> genomes,
                                          const SensorDataset& generation0,
                                          const SensorDataset& final_generation,
                                          std::span<const double> grid,
                                          const AnnealingSchedule& schedule,
                                          const SeedTree& seeds, std::size_t threads) {
  if (genomes.empty()) throw std::invalid_argument("compare_sensor_modes needs genomes");
  if (generation0.empty() || final_generation.empty()) {
    throw std::invalid_argument("compare_sensor_modes needs both sensor logs");
  }
  SensorModeComparison out;
  out.grid.assign(grid.begin(), grid.end());
  out.thermalized.assign(grid.size(), 0.0);
  out.generation0.assign(grid.size(), 0.0);
  out.final_generation.assign(grid.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(genomes.size());
  for (std::size_t i = 0; i < genomes.size(); ++i) {
    // The same stream per genome in all modes, so identical inputs give
    // identical curves.
    const SeedTree s = seeds.child(i);
    const auto th = heat_capacity_curve(genomes[i], grid, SensorMode::Thermalized, nullptr,
                                        schedule, s, threads);
    const auto g0 = heat_capacity_curve(genomes[i], grid, SensorMode::Clipped, &generation0,
                                        schedule, s, threads);
    const auto fin = heat_capacity_curve(genomes[i], grid, SensorMode::Clipped,
                                         &final_generation, schedule, s, threads);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      out.thermalized[k] += scale * th.values[k];
      out.generation0[k] += scale * g0.values[k];
      out.final_generation[k] += scale * fin.values[k];
    }
  }
  return out;
}

}  // namespace isingevo
