#include <doctest.h>

#include <cmath>
#include <numbers>

#include "isingevo/world.hpp"
#include "oracles.hpp"

using namespace isingevo;

namespace {

std::vector<IsingGenome> population(std::size_t n, std::uint64_t seed, double beta = 1.0) {
  Rng rng(seed);
  std::vector<IsingGenome> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(random_genome(Topology::layered(4, 4, 4), beta, 0.5, 1.0, rng));
  }
  return out;
}

}  // namespace

TEST_CASE("task names") {
  CHECK(task_from_string("simple") == Task::Simple);
  CHECK(task_from_string("hard") == Task::Hard);
  CHECK(to_string(Task::Hard) == "hard");
  CHECK_THROWS(task_from_string("medium"));
}

TEST_CASE("world config validation") {
  WorldConfig c;
  CHECK_NOTHROW(c.validate());
  c.thermalization_steps = 0;
  CHECK_THROWS(c.validate());
  c = WorldConfig{};
  c.v_thresh = 2.0;
  CHECK_THROWS(c.validate());
  c = WorldConfig{};
  c.world_size = -1;
  CHECK_THROWS(c.validate());
}

TEST_CASE("periodic geometry") {
  const double L = 100.0;
  CHECK(torus_distance({1, 1}, {99, 99}, L) == doctest::Approx(std::sqrt(8.0)));
  CHECK(torus_distance({0, 50}, {0, 0}, L) == doctest::Approx(50.0));
  const Vec2 d = torus_delta({99, 0}, {1, 0}, L);
  CHECK(d.x == doctest::Approx(2.0));
  const Vec2 w = wrap({-1.0, 100.0}, L);
  CHECK(w.x == doctest::Approx(99.0));
  CHECK(w.y == doctest::Approx(0.0));
  CHECK(wrap_angle(3.0 * std::numbers::pi) == doctest::Approx(-std::numbers::pi));
  CHECK(wrap_angle(0.5) == doctest::Approx(0.5));
  for (double a : {-10.0, -3.2, 0.0, 3.1, 7.0}) {
    const double r = wrap_angle(a);
    CHECK(r >= -std::numbers::pi);
    CHECK(r < std::numbers::pi);
  }
}

TEST_CASE("closest food matches nine-image scan") {
  Rng rng(3);
  const double L = 100.0;
  for (int k = 0; k < 200; ++k) {
    std::vector<Vec2> food(30);
    for (auto& f : food) f = {rng.uniform(0, L), rng.uniform(0, L)};
    const Vec2 p{rng.uniform(0, L), rng.uniform(0, L)};
    const auto [idx, dist] = oracle::nearest_food(food, p, L);
    const auto got = closest_food(food, p, L);
    CHECK(torus_distance(p, food[got], L) == doctest::Approx(dist).epsilon(1e-12));
    CHECK(got == idx);
  }
  CHECK_THROWS(closest_food({}, {0, 0}, L));
}

TEST_CASE("sensor normalization") {
  WorldConfig c;
  WorldState w;
  w.food = {{60.0, 50.0}};
  Agent a;
  a.position = {50.0, 50.0};
  a.heading = 0.0;
  a.speed = 0.5;
  a.energy = 0.0;
  auto r = sense(w, a, c);
  CHECK(r.theta_food == doctest::Approx(0.0));
  CHECK(r.d_food == doctest::Approx(2.0 * 10.0 / 50.0 - 1.0));
  CHECK(r.v_norm == doctest::Approx(0.0));
  CHECK(r.e_norm == doctest::Approx(-1.0));
  a.heading = std::numbers::pi / 2;  // food is to the right
  r = sense(w, a, c);
  CHECK(r.theta_food == doctest::Approx(-0.5));
  w.food = {{50.0, 50.0}};
  r = sense(w, a, c);
  CHECK(r.theta_food == 0.0);
  CHECK(r.d_food == -1.0);
  a.energy = 1e6;
  a.speed = 1.0;
  r = sense(w, a, c);
  CHECK(r.e_norm == doctest::Approx(1.0));
  CHECK(r.v_norm == doctest::Approx(1.0));
}

TEST_CASE("kinematics") {
  WorldConfig c;
  Agent a;
  a.position = {99.9, 10.0};
  a.heading = 0.0;
  a.speed = 0.0;
  a.energy = 2.0;
  a = step_agent(a, {MotorCommand::Accelerate, MotorCommand::NoOp}, c);
  CHECK(a.speed == doctest::Approx(c.a_lin));
  CHECK(a.position.x == doctest::Approx(99.95));
  CHECK(a.energy == doctest::Approx(2.0 - c.move_cost_coeff * c.a_lin));
  a.speed = 0.02;
  a = step_agent(a, {MotorCommand::Decelerate, MotorCommand::Accelerate}, c);
  CHECK(a.speed == 0.0);
  CHECK(a.heading == doctest::Approx(c.a_rot));
  a.speed = c.v_max;
  a = step_agent(a, {MotorCommand::Accelerate, MotorCommand::NoOp}, c);
  CHECK(a.speed == doctest::Approx(c.v_max));
  CHECK(a.position.x >= 0.0);
  CHECK(a.position.x < c.world_size);
}

TEST_CASE("eating rules for the two tasks") {
  WorldConfig c;
  Rng rng(1);
  WorldState w;
  w.food = {{10.0, 10.0}};
  Agent a;
  a.position = {10.5, 10.0};
  a.energy = 2.0;
  a.speed = 0.5;
  CHECK(consume(w, a, c, rng));
  CHECK(a.energy == doctest::Approx(3.0));
  CHECK((w.food[0].x != 10.0 || w.food[0].y != 10.0));

  w.food = {{10.0, 10.0}};
  c.task = Task::Hard;
  CHECK_FALSE(consume(w, a, c, rng));
  a.speed = 0.01;
  CHECK(consume(w, a, c, rng));

  w.food = {{10.0, 10.0}};
  a.speed = 0.0;
  CHECK_FALSE(consume(w, a, c, rng));
  a.speed = 0.01;
  a.position = {12.0, 10.0};
  CHECK_FALSE(consume(w, a, c, rng));
}

TEST_CASE("lifetime bookkeeping") {
  WorldConfig c;
  c.lifespan = 60;
  c.n_agents = 6;
  const auto genomes = population(6, 2);
  LifetimeOptions opt;
  opt.record_sensors = true;
  opt.sensor_stride = 5;
  opt.record_traces = true;
  const auto r = run_lifetime(genomes, c, SeedTree(4), opt);
  REQUIRE(r.fitness.size() == 6);
  REQUIRE(r.traces.size() == 6);
  CHECK(r.sensor_log.size() == 6 * 12);
  for (const auto& rec : r.sensor_log) {
    CHECK(rec.step % 5 == 0);
    for (double v : rec.reading.values()) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
  }
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& e = r.traces[i].energy;
    REQUIRE(e.size() == 60);
    double sum = 0.0;
    for (double x : e) sum += x;
    CHECK(r.fitness[i] == doctest::Approx(sum / 60.0));
    CHECK(r.final_energy[i] == e.back());
  }
  const auto again = run_lifetime(genomes, c, SeedTree(4), opt);
  CHECK(again.fitness == r.fitness);
  const auto other = run_lifetime(genomes, c, SeedTree(5), opt);
  CHECK(other.fitness != r.fitness);
}

TEST_CASE("an agent that never moves keeps its initial energy") {
  // One hidden neuron drives all motors at near-zero temperature, so the
  // motors copy its initial sign.
  const auto topo = Topology::layered(4, 1, 4);
  IsingGenome g = empty_genome(topo, 1e6);
  const std::size_t n = topo.size();
  for (std::size_t m : topo.motors()) {
    g.adjacency[4 * n + m] = 1;
    g.weights[4 * n + m] = 2.0;
  }
  WorldConfig c;
  c.n_agents = 1;
  c.lifespan = 200;
  LifetimeOptions opt;
  opt.record_traces = true;
  // The seed that starts the hidden neuron at -1 gives a resting agent.
  bool found = false;
  for (std::uint64_t s = 0; s < 20 && !found; ++s) {
    const std::vector<IsingGenome> pop{g};
    const auto r = run_lifetime(pop, c, SeedTree(s), opt);
    if (r.traces[0].speed.back() == 0.0) {
      CHECK(r.fitness[0] == 2.0);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("lifetime rejects bad layouts") {
  WorldConfig c;
  c.n_agents = 2;
  auto genomes = population(1, 1);
  CHECK_THROWS(run_lifetime(genomes, c, SeedTree(1)));
  Rng rng(1);
  std::vector<IsingGenome> odd{random_genome(Topology::layered(3, 4, 4), 1, 0.5, 1, rng),
                               random_genome(Topology::layered(3, 4, 4), 1, 0.5, 1, rng)};
  CHECK_THROWS(run_lifetime(odd, c, SeedTree(1)));
}
