#include "isingevo/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace isingevo {

std::string to_string(Task task) { return task == Task::Simple ? "simple" : "hard"; }

Task task_from_string(const std::string& name) {
  if (name == "simple") return Task::Simple;
  if (name == "hard") return Task::Hard;
  throw std::invalid_argument(fmt::format("unknown task '{}'", name));
}

void WorldConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(fmt::format("world.{} must be positive, got {}", name, v));
    }
  };
  positive(world_size, "world_size");
  positive(e_init, "e_init");
  positive(v_thresh, "v_thresh");
  positive(eat_radius, "eat_radius");
  positive(food_energy, "food_energy");
  positive(move_cost_coeff, "move_cost_coeff");
  positive(a_lin, "a_lin");
  positive(a_rot, "a_rot");
  positive(v_max, "v_max");
  positive(drag, "drag");
  positive(energy_scale, "energy_scale");
  if (n_agents == 0) throw std::invalid_argument("world.n_agents must be positive");
  if (n_food == 0) throw std::invalid_argument("world.n_food must be positive");
  if (lifespan == 0) throw std::invalid_argument("world.lifespan must be positive");
  if (!(v_thresh < v_max)) throw std::invalid_argument("world.v_thresh must be below v_max");
  if (drag > 1.0) throw std::invalid_argument("world.drag must not exceed 1");
  if (thermalization_steps < 1) {
    throw std::invalid_argument("world.thermalization_steps must be at least 1");
  }
}

Vec2 wrap(Vec2 p, double size) {
  auto w = [size](double x) {
    double r = x - size * std::floor(x / size);
    return r >= size ? 0.0 : r;
  };
  return {w(p.x), w(p.y)};
}

double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = radians - two_pi * std::floor((radians + std::numbers::pi) / two_pi);
  return r >= std::numbers::pi ? r - two_pi : r;
}

Vec2 torus_delta(Vec2 a, Vec2 b, double size) {
  auto d = [size](double x) {
    x -= size * std::round(x / size);
    return x;
  };
  return {d(b.x - a.x), d(b.y - a.y)};
}

double torus_distance(Vec2 a, Vec2 b, double size) {
  const Vec2 d = torus_delta(a, b, size);
  return std::hypot(d.x, d.y);
}

std::size_t closest_food(std::span<const Vec2> food, Vec2 p, double size) {
  if (food.empty()) throw std::invalid_argument("no food in the world");
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < food.size(); ++k) {
    const Vec2 d = torus_delta(p, food[k], size);
    const double d2 = d.x * d.x + d.y * d.y;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = k;
    }
  }
  return best;
}

SensorReading sense(const WorldState& world, const Agent& agent, const WorldConfig& config) {
  const std::size_t k = closest_food(world.food, agent.position, config.world_size);
  const Vec2 d = torus_delta(agent.position, world.food[k], config.world_size);
  const double dist = std::hypot(d.x, d.y);
  SensorReading r;
  r.theta_food =
      dist > 0.0 ? wrap_angle(std::atan2(d.y, d.x) - agent.heading) / std::numbers::pi : 0.0;
  r.d_food = std::clamp(2.0 * dist / (config.world_size / 2.0) - 1.0, -1.0, 1.0);
  r.v_norm = std::clamp(2.0 * agent.speed / config.v_max - 1.0, -1.0, 1.0);
  r.e_norm = std::clamp(2.0 * std::tanh(agent.energy / config.energy_scale) - 1.0, -1.0, 1.0);
  return r;
}

Agent step_agent(Agent agent, MotorCommands commands, const WorldConfig& config) {
  const double rot = static_cast<double>(commands.rotational);
  const double lin = static_cast<double>(commands.linear);
  agent.heading = wrap_angle(agent.heading + config.a_rot * rot);
  agent.speed = std::clamp(config.drag * agent.speed + config.a_lin * lin, 0.0, config.v_max);
  const Vec2 moved{agent.position.x + agent.speed * std::cos(agent.heading),
                   agent.position.y + agent.speed * std::sin(agent.heading)};
  agent.position = wrap(moved, config.world_size);
  agent.energy -= config.move_cost_coeff * agent.speed;
  return agent;
}

bool consume(WorldState& world, Agent& agent, const WorldConfig& config, Rng& rng) {
  // Food is eaten by passing over it, so a resting agent never eats.
  if (agent.speed <= 0.0) return false;
  if (config.task == Task::Hard && agent.speed > config.v_thresh) return false;
  const std::size_t k = closest_food(world.food, agent.position, config.world_size);
  if (torus_distance(agent.position, world.food[k], config.world_size) > config.eat_radius) {
    return false;
  }
  agent.energy += config.food_energy;
  world.food[k] = {rng.uniform(0.0, config.world_size), rng.uniform(0.0, config.world_size)};
  return true;
}

WorldState initial_world(const WorldConfig& config, Rng& rng) {
  WorldState w;
  w.food.reserve(config.n_food);
  for (std::size_t k = 0; k < config.n_food; ++k) {
    w.food.push_back({rng.uniform(0.0, config.world_size), rng.uniform(0.0, config.world_size)});
  }
  w.agents.reserve(config.n_agents);
  for (std::size_t i = 0; i < config.n_agents; ++i) {
    Agent a;
    a.position = {rng.uniform(0.0, config.world_size), rng.uniform(0.0, config.world_size)};
    a.heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
    a.energy = config.e_init;
    a.genome_id = i;
    w.agents.push_back(a);
  }
  return w;
}

LifetimeResult run_lifetime(std::span<const IsingGenome> genomes, const WorldConfig& config,
                            const SeedTree& seeds, const LifetimeOptions& options) {
  config.validate();
  if (genomes.size() != config.n_agents) {
    throw std::invalid_argument(fmt::format("run_lifetime: {} genomes for {} agents",
                                            genomes.size(), config.n_agents));
  }
  const std::size_t n = genomes.size();
  Rng world_rng = seeds.child(stream::kWorld).rng();
  WorldState world = initial_world(config, world_rng);

  std::vector<Network> networks;
  std::vector<NetworkState> states;
  std::vector<Rng> rngs;
  networks.reserve(n);
  states.reserve(n);
  rngs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& topo = genomes[i].topology;
    if (topo.sensors().size() != 4 || topo.motors().size() != 4) {
      throw std::invalid_argument("agent genomes need exactly 4 sensor and 4 motor neurons");
    }
    networks.emplace_back(genomes[i], config.dynamics);
    rngs.push_back(seeds.path(stream::kAgent, i).rng());
    states.push_back(random_state(topo, rngs.back()));
  }

  LifetimeResult result;
  result.fitness.assign(n, 0.0);
  if (options.record_traces) {
    result.traces.resize(n);
    for (auto& tr : result.traces) {
      tr.energy.reserve(config.lifespan);
      tr.speed.reserve(config.lifespan);
      tr.ate.reserve(config.lifespan);
    }
  }
  const std::size_t stride = std::max<std::size_t>(options.sensor_stride, 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint8_t> ate(n, 0);
  for (std::size_t t = 0; t < config.lifespan; ++t) {
    world_rng.shuffle(order.begin(), order.end());
    for (auto i : order) {
      Agent& agent = world.agents[i];
      const SensorReading reading = sense(world, agent, config);
      const auto values = reading.values();
      const auto sensors = genomes[i].topology.sensors();
      for (std::size_t k = 0; k < 4; ++k) states[i].spins[sensors[k]] = values[k];
      networks[i].thermalize(states[i], config.thermalization_steps, rngs[i]);
      agent = step_agent(agent, read_motors(genomes[i].topology, states[i]), config);
      ate[i] = consume(world, agent, config, world_rng) ? 1 : 0;
      if (options.record_sensors && t % stride == 0) {
        result.sensor_log.push_back({t, i, reading});
      }
    }
    ++world.step;
    for (std::size_t i = 0; i < n; ++i) {
      const Agent& agent = world.agents[i];
      result.fitness[i] += agent.energy;
      if (options.record_traces) {
        result.traces[i].energy.push_back(agent.energy);
        result.traces[i].speed.push_back(agent.speed);
        result.traces[i].ate.push_back(ate[i]);
      }
    }
  }
  result.final_energy.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.fitness[i] /= static_cast<double>(config.lifespan);
    result.final_energy.push_back(world.agents[i].energy);
  }
  return result;
}

}  // namespace isingevo
