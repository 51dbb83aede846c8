#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "forestlab/forest_analysis.hpp"

using namespace forestlab;

namespace {

// Path 0-1-...-(n-1) with edge i joining i and i+1, rooted at n-1.
SpanningForest path_forest(const Graph& g, Vertex n) {
  std::vector<Vertex> parent(g.vertex_count(), kNoVertex);
  std::vector<EdgeId> parent_edge(g.vertex_count(), kNoEdge);
  for (Vertex i = 0; i + 1 < n; ++i) {
    parent[i] = i + 1;
    parent_edge[i] = i;
  }
  return make_forest(parent, parent_edge);
}

std::vector<std::pair<Vertex, Vertex>> path_edges(Vertex n) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return edges;
}

}  // namespace

TEST_CASE("a path to the root has singleton bushes and unit cuts") {
  const Graph g(5, path_edges(5));
  const SpanningForest f = path_forest(g, 5);
  const RayDecomposition dec = ray_decompose(f, 0, 0.0);
  CHECK(dec.ray == Path{0, 1, 2, 3, 4});
  CHECK(dec.reported == 5);
  for (std::size_t n = 0; n < dec.bushes.size(); ++n) CHECK(dec.bushes[n] == std::vector<Vertex>{Vertex(n)});
  const JoinStatistics stats = cut_sets_and_J(g, dec);
  CHECK(stats.joins.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(stats.cuts[k] == std::vector<EdgeId>{EdgeId(k)});
    CHECK(stats.J[k] == 1);
  }
  CHECK(stats.count(0, 1, 2) == 1);
  CHECK(stats.count(0, 2, 2) == 0);
  CHECK(stats.tail_sum(2, 1) == 1);
  CHECK(stats.tail_sum(2, 2) == 0);
  const auto rows = resistance_growth_profile(g, f, 0, 10, 0.0);
  REQUIRE(rows.size() == 4);
  for (const GrowthRow& row : rows) {
    CHECK(row.resistance == doctest::Approx(double(row.n)));
    CHECK(row.lower_bound == doctest::Approx(double(row.n)));
  }
}

TEST_CASE("a star hanging at Ray(3) forms Bush_3") {
  auto edges = path_edges(5);
  edges.emplace_back(3, 5);
  edges.emplace_back(3, 6);
  const Graph g(7, edges);
  std::vector<Vertex> parent{1, 2, 3, 4, kNoVertex, 3, 3};
  std::vector<EdgeId> parent_edge{0, 1, 2, 3, kNoEdge, 4, 5};
  const SpanningForest f = make_forest(parent, parent_edge);
  const RayDecomposition dec = ray_decompose(f, 0, 0.0);
  CHECK(dec.bushes[3] == std::vector<Vertex>{3, 5, 6});
  CHECK(dec.bush_of[5] == 3);
  std::size_t total = 0;
  for (const auto& bush : dec.bushes) total += bush.size();
  CHECK(total == dec.tree.size());
}

TEST_CASE("an edge joining Bush_1 and Bush_4 lies in C_1, C_2, C_3") {
  auto edges = path_edges(6);
  edges.emplace_back(1, 4);
  const Graph g(6, edges);
  const SpanningForest f = path_forest(g, 6);
  const RayDecomposition dec = ray_decompose(f, 0, 0.0);
  const JoinStatistics stats = cut_sets_and_J(g, dec);
  const EdgeId chord = 5;
  for (std::size_t k = 0; k < stats.cuts.size(); ++k) {
    const bool in = std::find(stats.cuts[k].begin(), stats.cuts[k].end(), chord) != stats.cuts[k].end();
    CHECK(in == (k >= 1 && k <= 3));
  }
  const auto it = std::find_if(stats.joins.begin(), stats.joins.end(), [&](const auto& j) { return j.edge == chord; });
  REQUIRE(it != stats.joins.end());
  CHECK(JoinStatistics::multiplicity(*it) == 3);
  CHECK(stats.J[0] == 1);
  CHECK(stats.J[1] == 4);
  CHECK(stats.count(1, 2, 2) == 1);
  validate_cut_sets(induced_tree_graph(g, dec), dec, stats);

  JoinStatistics broken = stats;
  broken.cuts[2] = {2};
  CHECK_THROWS_AS(validate_cut_sets(induced_tree_graph(g, dec), dec, broken), DomainError);

  for (const GrowthRow& row : resistance_growth_profile(g, f, 0, 10, 0.0)) {
    CHECK(row.lower_bound <= row.resistance + 1e-9);
    CHECK(row.resistance <= row.n + 1e-9);
  }
}

TEST_CASE("drop fraction trims the reported part of the ray") {
  const Graph g(10, path_edges(10));
  const SpanningForest f = path_forest(g, 10);
  CHECK(ray_decompose(f, 0, 0.0).reported == 10);
  CHECK(ray_decompose(f, 0, 0.25).reported == 8);
  CHECK(ray_decompose(f, 9, 0.5).reported == 1);
  CHECK_THROWS_AS(ray_decompose(f, 0, 1.0), ContractViolation);
  CHECK(resistance_growth_profile(g, f, 0, 100, 0.25).size() == 7);
}

TEST_CASE("inter_component_joins examples") {
  const Graph g(4, path_edges(4));
  const SpanningForest f = make_forest({1, kNoVertex, 3, kNoVertex}, {0, kNoEdge, 2, kNoEdge});
  CHECK(inter_component_joins(g, f, 0, 3) == 1);
  CHECK(inter_component_joins(g, f, 0, 1) == 0);
  const Graph doubled(4, {{0, 1}, {1, 2}, {2, 3}, {1, 2}, {0, 3}});
  CHECK(inter_component_joins(doubled, f, 1, 2) == 3);
}

TEST_CASE("d=5 forests satisfy the partition, multiplicity and sandwich laws") {
  RngStream rng(41, 0);
  const LatticeBox box({5, 3, Boundary::Wired});
  for (int s = 0; s < 20; ++s) {
    const SpanningForest f = wsf_wired_box(box, rng);
    const RayDecomposition dec = ray_decompose(f, box.origin());
    std::size_t total = 0;
    for (const auto& bush : dec.bushes) total += bush.size();
    CHECK(total == dec.tree.size());
    for (const Vertex u : dec.tree) CHECK(dec.bush_of[u] < dec.ray.size());

    const JoinStatistics stats = cut_sets_and_J(box, dec);
    for (std::size_t i = 0; i < stats.joins.size(); ++i)
      CHECK(stats.cut_membership[i] == JoinStatistics::multiplicity(stats.joins[i]));
    validate_cut_sets(induced_tree_graph(box, dec), dec, stats);
    for (std::uint32_t n = 0; n < 3; ++n)
      for (std::uint32_t m = 1; m < 5; ++m) CHECK(stats.tail_sum(n, m + 1) <= stats.tail_sum(n, m));

    for (const GrowthRow& row : resistance_growth_profile(box, f, box.origin(), 50)) {
      CHECK(row.lower_bound <= row.resistance + 1e-9);
      CHECK(row.resistance <= row.n + 1e-9);
    }
    const RecurrenceRow rec = recurrence_row(box, f, box.origin());
    CHECK(std::is_sorted(rec.cut_partial_sums.begin(), rec.cut_partial_sums.end()));
    CHECK(rec.component_size == dec.tree.size());
    CHECK(rec.resistance > 0);
  }
}

TEST_CASE("1-D recurrence resistance is r or r/2") {
  RngStream rng(42, 0);
  const int radii[] = {1, 2, 3, 5, 8};
  const int origin[] = {0};
  for (int s = 0; s < 30; ++s) {
    for (const RecurrenceRow& row : recurrence_diagnostic(1, radii, origin, rng)) {
      const double r = row.radius;
      CHECK((std::abs(row.resistance - r) < 1e-9 || std::abs(row.resistance - r / 2) < 1e-9));
      CHECK((row.resistance == doctest::Approx(r / 2)) == (row.component_size == std::size_t(2 * r + 1)));
    }
  }
  const int outside[] = {4};
  CHECK_THROWS_AS(recurrence_diagnostic(1, radii, outside, rng), DomainError);
}

TEST_CASE("envelope fit recovers an exact n/m law and signs the trend") {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> grid;
  for (std::uint32_t n = 1; n <= 3; ++n)
    for (std::uint32_t m = n + 1; m <= 6; ++m) grid.emplace_back(n, m);
  const auto replicas = [&](double tilt) {
    std::vector<std::vector<double>> rows;
    for (int r = 0; r < 50; ++r) {
      std::vector<double> row;
      for (const auto& [n, m] : grid) row.push_back(2.0 * n / m + tilt * m + 0.01 * ((r % 5) - 2));
      rows.push_back(row);
    }
    return rows;
  };
  const auto exact = replicas(0);
  const EnvelopeFit fit = fit_join_envelope(grid, exact);
  CHECK(fit.constant == doctest::Approx(2.0));
  CHECK(std::abs(fit.trend) < 1e-9);
  for (const double r : fit.residual) CHECK(std::abs(r) < 1e-9);

  const auto falling = replicas(-0.05);
  CHECK(fit_join_envelope(grid, falling).trend > 0);
  const auto rising = replicas(0.05);
  CHECK(fit_join_envelope(grid, rising).trend < 0);
  CHECK_THROWS_AS(fit_join_envelope(grid, std::vector<std::vector<double>>{}), ContractViolation);
}
