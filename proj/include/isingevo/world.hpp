#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "isingevo/ising.hpp"
#include "isingevo/rng.hpp"

namespace isingevo {

enum class Task { Simple, Hard };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

/// Environment parameters. Unspecified physical constants default to values
/// under which an unevolved population neither starves nor thrives.
struct WorldConfig {
  double world_size = 100.0;
  std::size_t n_agents = 50;
  std::size_t n_food = 100;
  std::size_t lifespan = 2000;
  double e_init = 2.0;
  Task task = Task::Simple;
  double v_thresh = 0.05;
  double eat_radius = 1.0;
  double food_energy = 1.0;
  double move_cost_coeff = 0.01;
  double a_lin = 0.05;
  double a_rot = 0.1;
  double v_max = 1.0;
  double drag = 0.98;
  double energy_scale = 10.0;
  int thermalization_steps = 10;
  DynamicsOptions dynamics;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Agent {
  Vec2 position;
  double heading = 0.0;  // radians, kept in [-pi, pi)
  double speed = 0.0;
  double energy = 0.0;
  std::size_t genome_id = 0;
};

/// Normalized sensor values, each in [-1, 1]. Order matches the sensor
/// neurons: bearing, distance, speed, energy.
struct SensorReading {
  double theta_food = 0.0;
  double d_food = 0.0;
  double v_norm = 0.0;
  double e_norm = 0.0;

  std::array<double, 4> values() const { return {theta_food, d_food, v_norm, e_norm}; }
};

struct WorldState {
  std::vector<Agent> agents;
  std::vector<Vec2> food;
  std::size_t step = 0;
};

/// Minimal-image displacement from a to b on the torus of side `size`.
Vec2 torus_delta(Vec2 a, Vec2 b, double size);
double torus_distance(Vec2 a, Vec2 b, double size);
Vec2 wrap(Vec2 p, double size);
double wrap_angle(double radians);

/// Index of the food particle closest to p; first index wins exact ties.
std::size_t closest_food(std::span<const Vec2> food, Vec2 p, double size);

SensorReading sense(const WorldState& world, const Agent& agent, const WorldConfig& config);

Agent step_agent(Agent agent, MotorCommands commands, const WorldConfig& config);

/// Eats the nearest particle within eat_radius if the task allows it at the
/// agent's current speed, credits food_energy and respawns the particle at a
/// uniform position. At most one particle per call. Returns whether it ate.
bool consume(WorldState& world, Agent& agent, const WorldConfig& config, Rng& rng);

/// World with uniformly placed food and agents (speed 0, energy e_init).
WorldState initial_world(const WorldConfig& config, Rng& rng);

struct SensorRecord {
  std::size_t step = 0;
  std::size_t agent_id = 0;
  SensorReading reading;
};

struct AgentTrace {
  std::vector<double> energy;  // after each step
  std::vector<double> speed;   // after each step
  std::vector<std::uint8_t> ate;
};

struct LifetimeOptions {
  bool record_sensors = false;
  std::size_t sensor_stride = 1;
  bool record_traces = false;
};

struct LifetimeResult {
  std::vector<double> fitness;       // mean energy over steps 1..T
  std::vector<double> final_energy;  // energy after step T
  std::vector<SensorRecord> sensor_log;
  std::vector<AgentTrace> traces;
};

/// Simulates one shared world for config.lifespan steps. Agent i is driven
/// by genomes[i]. Every step the agents act in a freshly shuffled order; each
/// senses, thermalizes its network, reads its motors, moves and tries to eat.
LifetimeResult run_lifetime(std::span<const IsingGenome> genomes, const WorldConfig& config,
                            const SeedTree& seeds, const LifetimeOptions& options = {});

}  // namespace isingevo
