#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isingevo/rng.hpp"

namespace isingevo {

enum class NeuronClass : std::uint8_t { Sensor, Hidden, Motor };

char to_char(NeuronClass c);
NeuronClass neuron_class_from_char(char c);

/// Neuron classes plus the fixed admissible-edge mask of a network layout.
///
/// The default mask forbids self-loops and any edge between a sensor and a
/// motor neuron (both directions). Everything else is admissible.
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::vector<NeuronClass> classes);
  Topology(std::vector<NeuronClass> classes, std::vector<std::uint8_t> allowed);

  /// Sensors first, then hidden, then motors.
  static Topology layered(std::size_t n_sensors, std::size_t n_hidden,
                          std::size_t n_motors);

  std::size_t size() const { return classes_.size(); }
  NeuronClass neuron_class(std::size_t i) const { return classes_[i]; }
  bool allowed(std::size_t i, std::size_t j) const {
    return allowed_[i * size() + j] != 0;
  }

  std::span<const NeuronClass> classes() const { return classes_; }
  std::span<const std::uint8_t> mask() const { return allowed_; }
  std::span<const std::size_t> sensors() const { return sensors_; }
  std::span<const std::size_t> motors() const { return motors_; }
  /// Hidden and motor neurons, in index order.
  std::span<const std::size_t> non_sensors() const { return non_sensors_; }
  std::size_t admissible_count() const { return admissible_; }

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.classes_ == b.classes_ && a.allowed_ == b.allowed_;
  }

 private:
  void index();

  std::vector<NeuronClass> classes_;
  std::vector<std::uint8_t> allowed_;
  std::vector<std::size_t> sensors_;
  std::vector<std::size_t> motors_;
  std::vector<std::size_t> non_sensors_;
  std::size_t admissible_ = 0;
};

inline constexpr double kWeightBound = 2.0;

/// The evolvable unit: adjacency A, weights J (row-major N x N) and inverse
/// temperature beta.
struct IsingGenome {
  Topology topology;
  std::vector<std::uint8_t> adjacency;
  std::vector<double> weights;
  double beta = 1.0;

  std::size_t size() const { return topology.size(); }
  bool edge(std::size_t i, std::size_t j) const {
    return adjacency[i * size() + j] != 0;
  }
  double weight(std::size_t i, std::size_t j) const {
    return weights[i * size() + j];
  }
  std::size_t edge_count() const;

  /// Throws std::invalid_argument on any broken invariant.
  void validate(double weight_bound = kWeightBound) const;

  friend bool operator==(const IsingGenome&, const IsingGenome&) = default;
};

/// Empty genome (no edges, zero weights) on the given layout.
IsingGenome empty_genome(const Topology& topology, double beta);

/// Each admissible edge is present with probability edge_density; weights of
/// all admissible entries are drawn from U(-weight_range, weight_range).
IsingGenome random_genome(const Topology& topology, double beta,
                          double edge_density, double weight_range, Rng& rng);

/// Per-neuron states. Non-sensor entries are +-1; sensor entries are clamped
/// reals in [-1, 1].
struct NetworkState {
  std::vector<double> spins;

  std::size_t size() const { return spins.size(); }
  friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

/// Random +-1 for non-sensors, zero for sensors.
NetworkState random_state(const Topology& topology, Rng& rng);

enum class Dynamics { Glauber, Metropolis };

struct DynamicsOptions {
  Dynamics rule = Dynamics::Glauber;
  /// Use e(old) - e(new) in the acceptance rule, which favours energy-raising
  /// flips. Off by default.
  bool legacy_sign = false;

  friend bool operator==(const DynamicsOptions&, const DynamicsOptions&) = default;
};

/// e = -sum_{i,j} A_ij J_ij s_i s_j over all ordered pairs.
double network_energy(const IsingGenome& genome, const NetworkState& state);

/// e(s with s_i flipped) - e(s). Throws if i is a sensor neuron.
double delta_energy(const IsingGenome& genome, const NetworkState& state,
                    std::size_t i);

/// 1 / (1 + exp(beta * delta_e)), saturating to exactly 0 or 1 once
/// |beta * delta_e| exceeds 700.
double flip_probability(double delta_e, double beta);

/// Acceptance probability under the selected rule; delta_e is e(new) - e(old).
double acceptance_probability(double delta_e, double beta,
                              const DynamicsOptions& options);

/// A genome compiled for repeated simulation: dense effective couplings
/// K = AJ + (AJ)^T, the list of updatable neurons and a scratch order buffer.
///
/// A single Network is not safe to share across threads (sweeps reuse the
/// scratch buffer). Copies are independent.
class Network {
 public:
  explicit Network(const IsingGenome& genome, DynamicsOptions options = {},
                   bool update_sensors = false);

  std::size_t size() const { return n_; }
  double beta() const { return beta_; }
  void set_beta(double beta) { beta_ = beta; }
  std::span<const std::size_t> updatable() const { return updatable_; }

  double energy(std::span<const double> spins) const;
  /// sum_j K_ij s_j
  double local_field(std::span<const double> spins, std::size_t i) const;

  /// One sweep: every updatable neuron visited once in a fresh random order.
  /// Returns the number of flip attempts (one uniform draw each).
  std::size_t sweep(NetworkState& state, Rng& rng);
  std::size_t thermalize(NetworkState& state, int n_sweeps, Rng& rng);

 private:
  std::size_t n_ = 0;
  double beta_ = 1.0;
  DynamicsOptions options_;
  std::vector<double> coupling_;   // A o J
  std::vector<double> effective_;  // K
  std::vector<std::size_t> updatable_;
  std::vector<std::size_t> order_;
};

/// Value-returning wrappers over Network for one-off use.
NetworkState glauber_sweep(const IsingGenome& genome, NetworkState state,
                           Rng& rng, DynamicsOptions options = {});
NetworkState thermalize(const IsingGenome& genome, NetworkState state,
                        int n_iterations, Rng& rng, DynamicsOptions options = {});

enum class MotorCommand : std::int8_t { Decelerate = -1, NoOp = 0, Accelerate = 1 };

struct MotorCommands {
  MotorCommand linear = MotorCommand::NoOp;
  MotorCommand rotational = MotorCommand::NoOp;
  friend bool operator==(const MotorCommands&, const MotorCommands&) = default;
};

/// Motor neurons (m1, m2) drive linear, (m3, m4) rotational acceleration.
/// Agreement on +1 accelerates, agreement on -1 decelerates, else no-op.
MotorCommands read_motors(const Topology& topology, const NetworkState& state);

std::string to_string(MotorCommand c);

}  // namespace isingevo
