#include <doctest.h>

#include <random>
#include <sstream>

#include "forestlab/graph.hpp"
#include "oracles.hpp"

using namespace forestlab;

namespace {

void check_symmetric(const Graph& g) {
  std::size_t degree_sum = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    degree_sum += g.degree(v);
    for (const Incidence inc : g.incidences(v)) {
      const auto [a, b] = g.endpoints(inc.edge);
      CHECK(((a == v && b == inc.to) || (b == v && a == inc.to)));
      bool back = false;
      for (const Incidence w : g.incidences(inc.to)) back = back || (w.edge == inc.edge && w.to == v);
      CHECK(back);
    }
  }
  CHECK(degree_sum == 2 * g.edge_count());
}

Mask mask_of(std::size_t m, std::initializer_list<EdgeId> on) {
  Mask out(m, 0);
  for (const EdgeId e : on) out[e] = 1;
  return out;
}

}  // namespace

TEST_CASE("lattice box examples") {
  const Graph free1 = build_lattice_box({1, 1, Boundary::Free});
  CHECK(free1.vertex_count() == 3);
  CHECK(free1.edge_count() == 2);
  CHECK_FALSE(free1.wired_vertex());

  const Graph wired1 = build_lattice_box({1, 1, Boundary::Wired});
  CHECK(wired1.vertex_count() == 4);
  CHECK(wired1.edge_count() == 4);
  REQUIRE(wired1.wired_vertex());
  const Vertex w = *wired1.wired_vertex();
  CHECK(wired1.degree(w) == 2);
  const LatticeBox box1({1, 1, Boundary::Wired});
  const int left[] = {-1}, right[] = {1};
  CHECK(box1.edge_between(box1.id_of(left), w) != kNoEdge);
  CHECK(box1.edge_between(box1.id_of(right), w) != kNoEdge);

  const Graph wired2 = build_lattice_box({2, 1, Boundary::Wired});
  CHECK(wired2.vertex_count() == 10);
  CHECK(wired2.edge_count() == 24);
  CHECK(wired2.degree(*wired2.wired_vertex()) == 12);
  // the corners carry two parallel edges to the wired vertex
  const int corner[] = {1, 1};
  const LatticeBox box2({2, 1, Boundary::Wired});
  int parallel = 0;
  for (const Incidence inc : wired2.incidences(box2.id_of(corner))) parallel += inc.to == 9;
  CHECK(parallel == 2);
}

TEST_CASE("implicit boxes match their explicit graphs") {
  for (int d = 1; d <= 4; ++d) {
    for (int r = 1; r <= 3; ++r) {
      for (const Boundary b : {Boundary::Wired, Boundary::Free}) {
        const LatticeBox box({d, r, b});
        const Graph g = box.to_graph();
        REQUIRE(g.vertex_count() == box.vertex_count());
        REQUIRE(g.edge_count() == box.edge_count());
        for (EdgeId e = 0; e < g.edge_count(); ++e) CHECK(g.endpoints(e) == box.endpoints(e));
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
          REQUIRE(g.degree(v) == box.degree(v));
          std::vector<std::pair<Vertex, EdgeId>> a, b;
          for (std::size_t k = 0; k < g.degree(v); ++k) {
            a.emplace_back(g.incidence(v, k).to, g.incidence(v, k).edge);
            b.emplace_back(box.incidence(v, k).to, box.incidence(v, k).edge);
          }
          std::sort(a.begin(), a.end());
          std::sort(b.begin(), b.end());
          CHECK(a == b);
        }
        check_symmetric(g);
        const Graph h = build_lattice_box({d, r, b});
        CHECK(h.edges() == g.edges());
      }
    }
  }
}

TEST_CASE("coordinates round trip and the origin is the zero vector") {
  const LatticeBox box({3, 2, Boundary::Wired});
  for (Vertex v = 0; v < box.box_vertex_count(); ++v) {
    const auto c = box.coords_of(v);
    CHECK(box.id_of(c) == v);
    int l1 = 0;
    bool boundary = false;
    for (int axis = 0; axis < 3; ++axis) {
      CHECK(box.coordinate(v, axis) == c[axis]);
      l1 += std::abs(c[axis]);
      boundary = boundary || std::abs(c[axis]) == 2;
    }
    CHECK(box.l1_norm(v) == l1);
    CHECK(box.on_boundary(v) == boundary);
  }
  CHECK(box.coords_of(box.origin()) == std::vector<int>{0, 0, 0});
  const int outside[] = {3, 0, 0};
  CHECK_FALSE(box.contains(outside));
}

TEST_CASE("wired box of radius r embeds in radius r+1") {
  for (int d = 1; d <= 3; ++d) {
    for (int r = 1; r <= 3; ++r) {
      const LatticeBox small({d, r, Boundary::Wired}), big({d, r + 1, Boundary::Wired});
      for (Vertex u = 0; u < small.box_vertex_count(); ++u) {
        const Vertex bu = big.id_of(small.coords_of(u));
        for (std::size_t k = 0; k < small.degree(u); ++k) {
          const Vertex v = small.incidence(u, k).to;
          if (v == *small.wired_vertex()) continue;
          CHECK(big.edge_between(bu, big.id_of(small.coords_of(v))) != kNoEdge);
        }
      }
    }
  }
}

TEST_CASE("vertex budget") {
  CHECK_THROWS_AS(build_lattice_box({10, 10, Boundary::Wired}), ResourceError);
  try {
    lattice_box_size(3, 10, {1000});
    FAIL("expected a budget error");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("9261") != std::string::npos);
  }
  CHECK(lattice_box_size(3, 10, {9261}) == 9261);
}

TEST_CASE("components examples") {
  const Graph c4(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  CHECK(components(c4, Mask(4, 0)).component_count == 4);
  CHECK(components(c4, Mask(4, 1)).component_count == 1);
  const ComponentMap two = components(c4, mask_of(4, {0, 2}));
  CHECK(two.component_count == 2);
  CHECK(two.labels == std::vector<Vertex>{0, 0, 2, 2});
  CHECK(two.groups() == std::vector<std::vector<Vertex>>{{0, 1}, {2, 3}});
  CHECK_THROWS_AS(components(c4, Mask(3, 0)), ContractViolation);
}

TEST_CASE("induced component graph examples") {
  const Graph c4(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const auto tree = induced_component_graph(c4, components(c4, mask_of(4, {0, 1, 2})));
  CHECK(tree.edge_mask == Mask{1, 1, 1, 1});
  const auto discrete = induced_component_graph(c4, components(c4, Mask(4, 0)));
  CHECK(discrete.edge_mask == Mask{0, 0, 0, 0});
  const auto opposite = induced_component_graph(c4, components(c4, mask_of(4, {0, 2})));
  CHECK(opposite.edge_mask == Mask{1, 0, 1, 0});
  ComponentMap wrong;
  wrong.labels.assign(3, 0);
  CHECK_THROWS_AS(induced_component_graph(c4, wrong), ContractViolation);
}

TEST_CASE("induced component graph: monotone and idempotent on random graphs") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Graph g = oracle::random_connected_graph(gen, 3 + trial % 10, trial % 7);
    Mask small(g.edge_count(), 0), large(g.edge_count(), 0);
    std::bernoulli_distribution coin(0.4);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      small[e] = coin(gen);
      large[e] = small[e] || coin(gen);
    }
    const auto k_small = induced_component_graph(g, components(g, small));
    const auto k_large = induced_component_graph(g, components(g, large));
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      if (k_small.edge_mask[e]) CHECK(k_large.edge_mask[e]);
      if (small[e]) CHECK(k_small.edge_mask[e]);
    }
    CHECK(components(g, k_small.edge_mask).labels == k_small.components.labels);
    std::vector<std::pair<Vertex, Vertex>> chosen;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      if (small[e]) chosen.push_back(g.endpoints(e));
    }
    CHECK(oracle::component_labels(g.vertex_count(), chosen) == k_small.components.labels);
  }
}

TEST_CASE("counterexample graph") {
  const CounterexampleGraph cg = counterexample_graph(1);
  CHECK(cg.graph.vertex_count() == 2 * (243 + 1));
  CHECK(cg.copy_size == 244);
  CHECK(cg.graph.endpoints(cg.bridge) == std::pair<Vertex, Vertex>{cg.origins[0], cg.origins[1]});
  Mask keep(cg.graph.edge_count(), 1), vertices(cg.graph.vertex_count(), 1);
  for (EdgeId e = 0; e < cg.graph.edge_count(); ++e) {
    const auto [u, v] = cg.graph.endpoints(e);
    if (u == cg.wired[0] || u == cg.wired[1] || v == cg.wired[0] || v == cg.wired[1]) keep[e] = 0;
  }
  vertices[cg.wired[0]] = vertices[cg.wired[1]] = 0;
  CHECK(components(cg.graph, keep, vertices).component_count == 1);
  keep[cg.bridge] = 0;
  CHECK(components(cg.graph, keep, vertices).component_count == 2);
  CHECK(counterexample_graph(2).graph.vertex_count() == 2 * (3125 + 1));
  CHECK_THROWS_AS(counterexample_graph(2, {1000}), ResourceError);
}

TEST_CASE("edge list round trip") {
  const Graph g(4, {{0, 1}, {1, 2}, {1, 2}, {2, 3}}, Vertex{3});
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream in(out.str());
  const Graph h = read_edge_list(in);
  CHECK(h.vertex_count() == 4);
  CHECK(h.edges() == g.edges());
  CHECK(h.wired_vertex() == std::optional<Vertex>(3));
  std::istringstream bad("3 2\n0 1\n");
  CHECK_THROWS_AS(read_edge_list(bad), FormatError);
  std::istringstream loop("2 1\n1 1\n");
  CHECK_THROWS_AS(read_edge_list(loop), FormatError);
}

TEST_CASE("extract_subgraph keeps masked internal edges") {
  const Graph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 2}});
  const Vertex verts[] = {0, 1, 2};
  const Subgraph all = extract_subgraph(g, std::span<const Vertex>(verts), Mask{});
  CHECK(all.graph.edge_count() == 3);
  const Subgraph some = extract_subgraph(g, std::span<const Vertex>(verts), mask_of(5, {0, 4}));
  CHECK(some.graph.edge_count() == 2);
  CHECK(some.host_edge == std::vector<EdgeId>{0, 4});
  CHECK(some.local(3) == kNoVertex);
}
