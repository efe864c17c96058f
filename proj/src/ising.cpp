#include "isingevo/ising.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace isingevo {

char to_char(NeuronClass c) {
  switch (c) {
    case NeuronClass::Sensor: return 'S';
    case NeuronClass::Hidden: return 'H';
    case NeuronClass::Motor: return 'M';
  }
  return '?';
}

NeuronClass neuron_class_from_char(char c) {
  switch (c) {
    case 'S': return NeuronClass::Sensor;
    case 'H': return NeuronClass::Hidden;
    case 'M': return NeuronClass::Motor;
    default: throw std::invalid_argument(fmt::format("unknown neuron class '{}'", c));
  }
}

namespace {

bool sensor_motor_pair(NeuronClass a, NeuronClass b) {
  return (a == NeuronClass::Sensor && b == NeuronClass::Motor) ||
         (a == NeuronClass::Motor && b == NeuronClass::Sensor);
}

}  // namespace

Topology::Topology(std::vector<NeuronClass> classes) : classes_(std::move(classes)) {
  const std::size_t n = classes_.size();
  allowed_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      allowed_[i * n + j] = (i != j && !sensor_motor_pair(classes_[i], classes_[j])) ? 1 : 0;
    }
  }
  index();
}

Topology::Topology(std::vector<NeuronClass> classes, std::vector<std::uint8_t> allowed)
    : classes_(std::move(classes)), allowed_(std::move(allowed)) {
  const std::size_t n = classes_.size();
  if (allowed_.size() != n * n) {
    throw std::invalid_argument("topology mask size does not match neuron count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto& a = allowed_[i * n + j];
      if (a > 1) throw std::invalid_argument("topology mask entries must be 0 or 1");
      if (a && (i == j || sensor_motor_pair(classes_[i], classes_[j]))) {
        throw std::invalid_argument(
            fmt::format("topology mask admits forbidden edge ({}, {})", i, j));
      }
    }
  }
  index();
}

Topology Topology::layered(std::size_t n_sensors, std::size_t n_hidden, std::size_t n_motors) {
  std::vector<NeuronClass> classes;
  classes.insert(classes.end(), n_sensors, NeuronClass::Sensor);
  classes.insert(classes.end(), n_hidden, NeuronClass::Hidden);
  classes.insert(classes.end(), n_motors, NeuronClass::Motor);
  return Topology(std::move(classes));
}

void Topology::index() {
  sensors_.clear();
  motors_.clear();
  non_sensors_.clear();
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i] == NeuronClass::Sensor) {
      sensors_.push_back(i);
    } else {
      non_sensors_.push_back(i);
      if (classes_[i] == NeuronClass::Motor) motors_.push_back(i);
    }
  }
  admissible_ = 0;
  for (auto a : allowed_) admissible_ += a;
}

std::size_t IsingGenome::edge_count() const {
  std::size_t count = 0;
  for (auto a : adjacency) count += a;
  return count;
}

void IsingGenome::validate(double weight_bound) const {
  const std::size_t n = size();
  if (adjacency.size() != n * n || weights.size() != n * n) {
    throw std::invalid_argument("genome matrices do not match topology size");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument(fmt::format("genome beta must be positive, got {}", beta));
  }
  for (std::size_t k = 0; k < n * n; ++k) {
    if (adjacency[k] > 1) throw std::invalid_argument("adjacency entries must be 0 or 1");
    if (adjacency[k] && !topology.mask()[k]) {
      throw std::invalid_argument(
          fmt::format("edge ({}, {}) is not admissible", k / n, k % n));
    }
    if (!std::isfinite(weights[k]) || std::abs(weights[k]) > weight_bound) {
      throw std::invalid_argument(
          fmt::format("weight ({}, {}) = {} outside [-{}, {}]", k / n, k % n, weights[k],
                      weight_bound, weight_bound));
    }
  }
}

IsingGenome empty_genome(const Topology& topology, double beta) {
  const std::size_t n = topology.size();
  return IsingGenome{topology, std::vector<std::uint8_t>(n * n, 0),
                     std::vector<double>(n * n, 0.0), beta};
}

IsingGenome random_genome(const Topology& topology, double beta, double edge_density,
                          double weight_range, Rng& rng) {
  IsingGenome g = empty_genome(topology, beta);
  const auto mask = topology.mask();
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    g.adjacency[k] = rng.bernoulli(edge_density) ? 1 : 0;
    g.weights[k] = rng.uniform(-weight_range, weight_range);
  }
  return g;
}

NetworkState random_state(const Topology& topology, Rng& rng) {
  NetworkState s{std::vector<double>(topology.size(), 0.0)};
  for (auto i : topology.non_sensors()) s.spins[i] = rng.sign();
  return s;
}

namespace {

void check_dimension(const IsingGenome& genome, const NetworkState& state) {
  if (state.size() != genome.size()) {
    throw std::invalid_argument(fmt::format("state has {} entries, genome has {} neurons",
                                            state.size(), genome.size()));
  }
}

}  // namespace

double network_energy(const IsingGenome& genome, const NetworkState& state) {
  check_dimension(genome, state);
  const std::size_t n = genome.size();
  const double* s = state.spins.data();
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* a = genome.adjacency.data() + i * n;
    const double* w = genome.weights.data() + i * n;
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (a[j]) row += w[j] * s[j];
    }
    e += s[i] * row;
  }
  return -e;
}

double delta_energy(const IsingGenome& genome, const NetworkState& state, std::size_t i) {
  check_dimension(genome, state);
  if (i >= genome.size()) throw std::out_of_range("neuron index out of range");
  if (genome.topology.neuron_class(i) == NeuronClass::Sensor) {
    throw std::invalid_argument(fmt::format("neuron {} is a sensor and cannot flip", i));
  }
  const std::size_t n = genome.size();
  double field = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double k = 0.0;
    if (genome.adjacency[i * n + j]) k += genome.weights[i * n + j];
    if (genome.adjacency[j * n + i]) k += genome.weights[j * n + i];
    field += k * state.spins[j];
  }
  return 2.0 * state.spins[i] * field;
}

double flip_probability(double delta_e, double beta) {
  const double x = beta * delta_e;
  if (x > 700.0) return 0.0;
  if (x < -700.0) return 1.0;
  if (x > 0.0) {
    const double t = std::exp(-x);
    return t / (1.0 + t);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double acceptance_probability(double delta_e, double beta, const DynamicsOptions& options) {
  const double d = options.legacy_sign ? -delta_e : delta_e;
  if (options.rule == Dynamics::Metropolis) {
    const double x = beta * d;
    if (x <= 0.0) return 1.0;
    return x > 700.0 ? 0.0 : std::exp(-x);
  }
  return flip_probability(d, beta);
}

Network::Network(const IsingGenome& genome, DynamicsOptions options, bool update_sensors)
    : n_(genome.size()), beta_(genome.beta), options_(options) {
  coupling_.assign(n_ * n_, 0.0);
  for (std::size_t k = 0; k < n_ * n_; ++k) {
    if (genome.adjacency[k]) coupling_[k] = genome.weights[k];
  }
  effective_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      effective_[i * n_ + j] = coupling_[i * n_ + j] + coupling_[j * n_ + i];
    }
  }
  if (update_sensors) {
    for (std::size_t i = 0; i < n_; ++i) updatable_.push_back(i);
  } else {
    const auto ns = genome.topology.non_sensors();
    updatable_.assign(ns.begin(), ns.end());
  }
  order_ = updatable_;
}

double Network::energy(std::span<const double> spins) const {
  double e = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double* c = coupling_.data() + i * n_;
    double row = 0.0;
    for (std::size_t j = 0; j < n_; ++j) row += c[j] * spins[j];
    e += spins[i] * row;
  }
  return -e;
}

double Network::local_field(std::span<const double> spins, std::size_t i) const {
  const double* k = effective_.data() + i * n_;
  double h = 0.0;
  for (std::size_t j = 0; j < n_; ++j) h += k[j] * spins[j];
  return h;
}

std::size_t Network::sweep(NetworkState& state, Rng& rng) {
  std::copy(updatable_.begin(), updatable_.end(), order_.begin());
  rng.shuffle(order_.begin(), order_.end());
  std::span<double> s(state.spins);
  for (auto i : order_) {
    const double delta = 2.0 * s[i] * local_field(s, i);
    if (rng.uniform() < acceptance_probability(delta, beta_, options_)) s[i] = -s[i];
  }
  return order_.size();
}

std::size_t Network::thermalize(NetworkState& state, int n_sweeps, Rng& rng) {
  if (n_sweeps < 0) throw std::invalid_argument("number of sweeps must be non-negative");
  std::size_t attempts = 0;
  for (int k = 0; k < n_sweeps; ++k) attempts += sweep(state, rng);
  return attempts;
}

NetworkState glauber_sweep(const IsingGenome& genome, NetworkState state, Rng& rng,
                           DynamicsOptions options) {
  check_dimension(genome, state);
  Network net(genome, options);
  net.sweep(state, rng);
  return state;
}

NetworkState thermalize(const IsingGenome& genome, NetworkState state, int n_iterations,
                        Rng& rng, DynamicsOptions options) {
  check_dimension(genome, state);
  Network net(genome, options);
  net.thermalize(state, n_iterations, rng);
  return state;
}

namespace {

MotorCommand unit_command(double a, double b) {
  if (a > 0.0 && b > 0.0) return MotorCommand::Accelerate;
  if (a < 0.0 && b < 0.0) return MotorCommand::Decelerate;
  return MotorCommand::NoOp;
}

}  // namespace

MotorCommands read_motors(const Topology& topology, const NetworkState& state) {
  const auto m = topology.motors();
  if (m.size() != 4) {
    throw std::invalid_argument(fmt::format("expected 4 motor neurons, found {}", m.size()));
  }
  const auto& s = state.spins;
  return {unit_command(s[m[0]], s[m[1]]), unit_command(s[m[2]], s[m[3]])};
}

std::string to_string(MotorCommand c) {
  switch (c) {
    case MotorCommand::Accelerate: return "accelerate";
    case MotorCommand::Decelerate: return "decelerate";
    case MotorCommand::NoOp: return "noop";
  }
  return "?";
}

}  // namespace isingevo
