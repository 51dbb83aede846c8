#include <doctest.h>

#include <cmath>
#include <random>

#include "forestlab/resistance.hpp"
#include "oracles.hpp"

using namespace forestlab;

namespace {

bool close(double a, double b, double rel = 1e-9) {
  return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

}  // namespace

TEST_CASE("energy examples") {
  const Graph path(3, {{0, 1}, {1, 2}});
  CHECK(energy(path, Eigen::Vector3d(1, 0.5, 0)) == doctest::Approx(0.5));
  const Graph doubled(2, {{0, 1}, {0, 1}});
  CHECK(energy(doubled, Eigen::Vector2d(1, 0)) == doctest::Approx(2));
  CHECK_THROWS_AS(energy(path, Eigen::Vector2d(1, 0)), ContractViolation);
}

TEST_CASE("effective_resistance examples") {
  const Graph path(4, {{0, 1}, {1, 2}, {2, 3}});
  CHECK(effective_resistance(path, 0, 3) == doctest::Approx(3));
  const Graph doubled(2, {{0, 1}, {0, 1}});
  CHECK(effective_resistance(doubled, 0, 1) == doctest::Approx(0.5));
  const Graph triangle(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(effective_resistance(triangle, 0, 1) == doctest::Approx(2.0 / 3));
  const Graph square(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  CHECK(effective_resistance(square, 0, 2) == doctest::Approx(1));
  CHECK(effective_resistance(square, 0, 1) == doctest::Approx(0.75));
  const Graph split(4, {{0, 1}, {2, 3}});
  CHECK(std::isinf(effective_resistance(split, 0, 3)));
  const Vertex a[] = {0}, b[] = {2, 3};
  CHECK(effective_resistance(path, a, b) == doctest::Approx(2));
}

TEST_CASE("solver matches the pseudo-inverse oracle and the sparse path") {
  std::mt19937_64 gen(31);
  ResistanceOptions sparse;
  sparse.dense_limit = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Graph g = oracle::random_connected_graph(gen, 3 + trial % 25, trial % 17);
    std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(g.vertex_count() - 1));
    const Vertex a = pick(gen);
    Vertex b = pick(gen);
    if (a == b) b = (a + 1) % g.vertex_count();
    const double expected = oracle::pinv_resistance(g, a, b);
    CHECK(close(effective_resistance(g, a, b), expected, 1e-8));
    CHECK(close(effective_resistance(g, a, b, sparse), expected, 1e-7));
    const GroundedLaplacian grounded(g, a);
    CHECK(close(grounded.resistance_to(b), expected, 1e-8));
    CHECK(grounded.resistance_to(a) == 0);
  }
}

TEST_CASE("series-parallel networks match the reduction oracle") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto sp = oracle::series_parallel(seed, 2 + static_cast<int>(seed % 5));
    const Graph g(sp.vertex_count, sp.edges);
    CHECK(close(effective_resistance(g, 0, 1), sp.resistance));
  }
}

TEST_CASE("resistance is a metric and obeys Rayleigh monotonicity") {
  std::mt19937_64 gen(32);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = oracle::random_connected_graph(gen, 4 + trial % 10, 3 + trial % 5);
    const std::size_t n = g.vertex_count();
    std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(n - 1));
    const Vertex x = pick(gen), z = pick(gen);
    const Vertex y = (x + 1 + pick(gen) % (n - 1)) % n;
    const auto dist = [&](Vertex p, Vertex q) { return p == q ? 0.0 : effective_resistance(g, p, q); };
    const double rxy = effective_resistance(g, x, y);
    CHECK(rxy == doctest::Approx(effective_resistance(g, y, x)));
    CHECK(rxy <= dist(x, z) + dist(z, y) + 1e-9);
    CHECK_THROWS_AS(effective_resistance(g, x, x), DomainError);

    auto edges = g.edges();
    const Vertex u = pick(gen), v = pick(gen);
    if (u != v) edges.emplace_back(u, v);
    const Graph more(n, edges);
    CHECK(effective_resistance(more, x, y) <= rxy + 1e-9);
  }
}

TEST_CASE("the harmonic potential minimises energy") {
  std::mt19937_64 gen(33);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = oracle::random_connected_graph(gen, 6 + trial % 8, 4);
    const Vertex a[] = {0}, b[] = {1};
    const PotentialField field = solve_potential(g, a, b);
    CHECK(field.connected);
    CHECK(field.values(0) == 1);
    CHECK(field.values(1) == 0);
    CHECK(energy(g, field.values) == doctest::Approx(field.energy));
    CHECK(field.resistance() == doctest::Approx(1 / field.energy));
    std::normal_distribution<double> noise(0, 0.1);
    Eigen::VectorXd other = field.values;
    for (Eigen::Index i = 2; i < other.size(); ++i) other(i) += noise(gen);
    CHECK(energy(g, other) >= field.energy - 1e-12);

    const UnitFlow current = current_flow(g, field);
    CHECK(unit_flow_violation(g, a, b, current) < 1e-9);
    CHECK(thomson_upper_bound(g, a, b, current) == doctest::Approx(field.resistance()));
  }
}

TEST_CASE("Nash-Williams and Thomson examples") {
  const Graph path(4, {{0, 1}, {1, 2}, {2, 3}});
  const Vertex a[] = {0}, b[] = {3};
  const CutSetFamily singles{{{0}, {1}, {2}}};
  CHECK(nash_williams_lower_bound(path, a, b, singles) == doctest::Approx(3));
  const Graph edge(2, {{0, 1}});
  const Vertex e0[] = {0}, e1[] = {1};
  CHECK(nash_williams_lower_bound(edge, e0, e1, CutSetFamily{{{0}, {0}}}) == doctest::Approx(1));
  const UnitFlow along{{1, 1, 1}};
  CHECK(thomson_upper_bound(path, a, b, along) == doctest::Approx(3));
  const UnitFlow broken{{1, 0.5, 1}};
  CHECK_THROWS_AS(thomson_upper_bound(path, a, b, broken), DomainError);

  const Graph square(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const Vertex s[] = {0}, t[] = {2};
  const CutSetFamily star{{{0, 3}, {1, 2}}};
  CHECK(nash_williams_lower_bound(square, s, t, star) == doctest::Approx(1));
  const CutSetFamily overlapping{{{0, 3}, {0, 2}}};
  CHECK(overlapping.multiplicity(4) == std::vector<std::uint32_t>{2, 0, 1, 1});
  CHECK(nash_williams_lower_bound(square, s, t, overlapping) == doctest::Approx(2.0 / 3));
  const CutSetFamily leaky{{{0}}};
  CHECK_THROWS_AS(leaky.validate(square, s, t), DomainError);
}

TEST_CASE("Nash-Williams <= resistance <= Thomson on random graphs") {
  std::mt19937_64 gen(34);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = oracle::random_connected_graph(gen, 2 + trial % 29, trial % 20);
    const Vertex a[] = {0}, b[] = {1};
    const CutSetFamily family = oracle::random_cut_family(g, 0, 1, gen);
    family.validate(g, a, b);
    const UnitFlow flow = oracle::random_unit_flow(g, 0, 1, gen);
    CHECK(unit_flow_violation(g, a, b, flow) < 1e-9);
    const double r = effective_resistance(g, 0, 1);
    CHECK(nash_williams_lower_bound(g, a, b, family) <= r + 1e-9);
    CHECK(r <= thomson_upper_bound(g, a, b, flow) + 1e-9);
  }
}

TEST_CASE("wired box resistance") {
  const int radii[] = {1, 2, 3, 4, 5};
  const int x[] = {0}, y[] = {1};
  const auto line = wired_effective_resistance(1, radii, x, y);
  for (std::size_t i = 0; i < line.size(); ++i) {
    const double r = radii[i];
    CHECK(line[i] == doctest::Approx((2 * r + 1) / (2 * r + 2)));
    CHECK(line[i] <= 1);
    if (i > 0) CHECK(line[i] >= line[i - 1]);
  }
  const int r5[] = {1, 2};
  const int x5[] = {0, 0, 0, 0, 0}, y5[] = {1, 0, 0, 0, 0};
  const auto five = wired_effective_resistance(5, r5, x5, y5);
  for (const double v : five) {
    CHECK(v > 0);
    CHECK(v < 1);
  }
  CHECK(five[1] >= five[0]);
  const int far[] = {3};
  CHECK_THROWS(wired_effective_resistance(1, r5, x, far));
}

TEST_CASE("local_modification_gap examples") {
  const Graph h(3, {{0, 1}, {1, 2}});
  const Graph h_prime(3, {{0, 1}, {1, 2}, {0, 2}});
  const std::pair<Vertex, Vertex> probes[] = {{0, 2}, {0, 1}};
  CHECK(local_modification_gap(h, h_prime, probes) == doctest::Approx(4.0 / 3));
  CHECK(local_modification_gap(h, h, probes) == doctest::Approx(0));
  CHECK(local_modification_gap(h_prime, h, probes) == doctest::Approx(-1.0 / 3));
}
