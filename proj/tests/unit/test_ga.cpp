#include <doctest.h>

#include <cmath>

#include "isingevo/analysis.hpp"
#include "isingevo/ga.hpp"

using namespace isingevo;

namespace {

std::vector<IsingGenome> population(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<IsingGenome> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(random_genome(Topology::layered(4, 4, 4), 1.0, 0.5, 1.0, rng));
  }
  return out;
}

std::size_t differing_entries(const IsingGenome& a, const IsingGenome& b) {
  std::size_t d = 0;
  for (std::size_t k = 0; k < a.adjacency.size(); ++k) {
    d += a.adjacency[k] != b.adjacency[k] || a.weights[k] != b.weights[k];
  }
  return d;
}

}  // namespace

TEST_CASE("lineage tag names round trip") {
  for (auto t : {LineageTag::Init, LineageTag::Copy, LineageTag::Mutate, LineageTag::Mate,
                 LineageTag::Elite, LineageTag::Sampled}) {
    CHECK(lineage_from_string(to_string(t)) == t);
  }
  CHECK_THROWS(lineage_from_string("clone"));
}

TEST_CASE("config validation") {
  GAConfig c;
  CHECK(c.population_size() == 50);
  CHECK_NOTHROW(c.validate());
  c.mutation_prob = 1.5;
  CHECK_THROWS(c.validate());
  c = GAConfig{};
  c.n_duplicated = 0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("mutation changes at most one adjacency entry and one weight") {
  Rng rng(1);
  GAConfig c;
  const auto pop = population(200, 2);
  std::size_t toggles = 0;
  for (const auto& g : pop) {
    const auto m = mutate(g, rng, c);
    CHECK_NOTHROW(m.validate());
    std::size_t adj = 0;
    std::size_t w = 0;
    for (std::size_t k = 0; k < g.adjacency.size(); ++k) {
      adj += g.adjacency[k] != m.adjacency[k];
      w += g.weights[k] != m.weights[k];
      if (g.adjacency[k] != m.adjacency[k]) CHECK(g.topology.mask()[k] == 1);
    }
    CHECK(adj <= 1);
    CHECK(w <= 1);
    toggles += adj;
    CHECK(m.beta > 0.0);
    CHECK(std::abs(m.beta / g.beta - 1.0) < 0.2);
  }
  // Toggle probability 0.5 over 200 draws.
  CHECK(toggles > 60);
  CHECK(toggles < 140);
}

TEST_CASE("mating") {
  Rng rng(3);
  const auto pop = population(2, 4);
  const auto& a = pop[0];
  const auto& b = pop[1];
  const auto c1 = mate_weighted(a, b, 1.0, rng);
  CHECK(c1 == a);
  const auto c0 = mate_weighted(a, b, 0.0, rng);
  CHECK(c0 == b);
  const auto half = mate_weighted(a, b, 0.5, rng);
  for (std::size_t k = 0; k < a.weights.size(); ++k) {
    CHECK(half.weights[k] == doctest::Approx(0.5 * (a.weights[k] + b.weights[k])));
    CHECK((half.adjacency[k] == a.adjacency[k] || half.adjacency[k] == b.adjacency[k]));
  }
  CHECK(half.beta == doctest::Approx(0.5 * (a.beta + b.beta)));
  for (int k = 0; k < 20; ++k) CHECK(mate(a, a, rng) == a);
  Rng r2(1);
  const auto other = random_genome(Topology::layered(4, 5, 4), 1.0, 0.5, 1.0, r2);
  CHECK_THROWS(mate(a, other, rng));
}

TEST_CASE("breeding composition and elitism") {
  GAConfig c;
  const auto pop = population(50, 5);
  std::vector<double> fitness(50);
  for (std::size_t i = 0; i < 50; ++i) fitness[i] = static_cast<double>((i * 37) % 50);
  Rng rng(6);
  const auto next = next_generation(pop, fitness, rng, c);
  REQUIRE(next.population.size() == 50);
  const auto counts = count_lineage(next.lineage);
  CHECK(counts.copy == 20);
  CHECK(counts.mutate == 15);
  CHECK(counts.mate == 15);
  const auto ranked = descending_order(fitness);
  for (std::size_t k = 0; k < 20; ++k) CHECK(next.population[k] == pop[ranked[k]]);
  // Mutant slots cycle through the top ten: 1..10 then 1..5.
  for (std::size_t k = 0; k < 15; ++k) {
    const auto& parent = pop[ranked[k % 10]];
    const auto& child = next.population[20 + k];
    CHECK(differing_entries(parent, child) <= 2);
    CHECK(child.topology == parent.topology);
  }
  CHECK_THROWS(next_generation(std::span(pop).first(49), std::span(fitness).first(49), rng, c));
}

TEST_CASE("mutation probability zero copies the top ten unchanged") {
  GAConfig c;
  c.mutation_prob = 0.0;
  const auto pop = population(50, 8);
  std::vector<double> fitness(50);
  for (std::size_t i = 0; i < 50; ++i) fitness[i] = -static_cast<double>(i);
  Rng rng(9);
  const auto next = next_generation(pop, fitness, rng, c);
  for (std::size_t k = 0; k < 15; ++k) CHECK(next.population[20 + k] == pop[k % 10]);
}

TEST_CASE("breeding is deterministic for a fixed seed") {
  GAConfig c;
  const auto pop = population(50, 10);
  std::vector<double> fitness(50, 1.0);
  Rng a(77);
  Rng b(77);
  CHECK(next_generation(pop, fitness, a, c).population ==
        next_generation(pop, fitness, b, c).population);
}
