#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "forestlab/disjoint_set.hpp"
#include "forestlab/errors.hpp"

namespace forestlab {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();
inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();

/// One entry of a vertex's incidence list: the far endpoint and the edge id.
struct Incidence {
  Vertex to;
  EdgeId edge;
  friend bool operator==(const Incidence&, const Incidence&) = default;
};

/// Per-edge (or per-vertex) membership flags.
using Mask = std::vector<std::uint8_t>;

struct Limits {
  std::uint64_t vertex_budget = std::uint64_t{1} << 27;
};

/// Immutable undirected multigraph in compressed adjacency form. Parallel
/// edges keep distinct ids; self-loops are rejected.
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t vertex_count, std::vector<std::pair<Vertex, Vertex>> edges,
        std::optional<Vertex> wired_vertex = std::nullopt);

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  Incidence incidence(Vertex v, std::size_t k) const { return adjacency_[offsets_[v] + k]; }
  std::span<const Incidence> incidences(Vertex v) const {
    return {adjacency_.data() + offsets_[v], degree(v)};
  }
  std::pair<Vertex, Vertex> endpoints(EdgeId e) const { return edges_[e]; }
  const std::vector<std::pair<Vertex, Vertex>>& edges() const noexcept { return edges_; }
  std::optional<Vertex> wired_vertex() const noexcept { return wired_; }

 private:
  std::size_t vertex_count_ = 0;
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Incidence> adjacency_;
  std::optional<Vertex> wired_;
};

/// Anything a random walk can run on: explicit graphs and implicit boxes.
template <class G>
concept WalkableGraph = requires(const G& g, Vertex v, std::size_t k, EdgeId e) {
  { g.vertex_count() } -> std::convertible_to<std::size_t>;
  { g.edge_count() } -> std::convertible_to<std::size_t>;
  { g.degree(v) } -> std::convertible_to<std::size_t>;
  { g.incidence(v, k) } -> std::same_as<Incidence>;
  { g.endpoints(e) } -> std::same_as<std::pair<Vertex, Vertex>>;
  { g.wired_vertex() } -> std::same_as<std::optional<Vertex>>;
};

enum class Boundary { Wired, Free };

struct LatticeBoxSpec {
  int dimension = 1;
  int radius = 1;
  Boundary boundary = Boundary::Wired;
};

/// The box {-r..r}^d of Z^d, stored implicitly. Vertex ids are the
/// mixed-radix encoding of (c_0 + r, ..., c_{d-1} + r), axis 0 fastest; with
/// a wired boundary the extra vertex id side^d stands for everything outside
/// the box and every edge leaving the box is redirected to it.
///
/// Edge ids (wired): u*d + axis is the edge from u in the +axis direction
/// (to the wired vertex when c_axis = r); the -axis edges from the c_axis = -r
/// face follow at offset side^d * d. Free boxes number the edges along each
/// axis consecutively.
class LatticeBox {
 public:
  explicit LatticeBox(LatticeBoxSpec spec, Limits limits = {});

  const LatticeBoxSpec& spec() const noexcept { return spec_; }
  int dimension() const noexcept { return spec_.dimension; }
  int radius() const noexcept { return spec_.radius; }
  int side() const noexcept { return side_; }
  bool wired() const noexcept { return spec_.boundary == Boundary::Wired; }

  std::size_t box_vertex_count() const noexcept { return box_vertices_; }
  std::size_t vertex_count() const noexcept { return box_vertices_ + (wired() ? 1 : 0); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t degree(Vertex v) const;
  Incidence incidence(Vertex v, std::size_t k) const;
  std::pair<Vertex, Vertex> endpoints(EdgeId e) const;
  std::optional<Vertex> wired_vertex() const noexcept {
    return wired() ? std::optional<Vertex>(static_cast<Vertex>(box_vertices_)) : std::nullopt;
  }

  Vertex origin() const { return origin_; }
  bool contains(std::span<const int> coords) const;
  Vertex id_of(std::span<const int> coords) const;
  std::vector<int> coords_of(Vertex v) const;
  int coordinate(Vertex v, int axis) const {
    return static_cast<int>((v / stride_[axis]) % side_) - spec_.radius;
  }
  /// Edge joining u and v, or kNoEdge. With parallel edges, the lowest id.
  EdgeId edge_between(Vertex u, Vertex v) const;
  /// Graph distance to the origin (L1 norm of the coordinates).
  int l1_norm(Vertex v) const;
  /// Box vertices with at least one coordinate equal to +-r.
  bool on_boundary(Vertex v) const;

  Graph to_graph() const;

 private:
  std::size_t face_index(Vertex v, int axis) const;
  Vertex face_vertex(std::size_t index, int axis, int coordinate) const;

  LatticeBoxSpec spec_;
  int side_ = 0;
  std::size_t box_vertices_ = 0;
  std::size_t face_size_ = 0;  // side^(d-1)
  std::size_t edge_count_ = 0;
  std::vector<std::size_t> stride_;
  Vertex origin_ = 0;
};

/// Explicit graph of the box described by spec.
Graph build_lattice_box(const LatticeBoxSpec& spec, Limits limits = {});

/// Two wired Z^5 boxes of radius r, each keeping its own wired vertex, and a
/// bridge edge between the two origins.
struct CounterexampleGraph {
  Graph graph;
  std::array<Vertex, 2> origins{};
  std::array<Vertex, 2> wired{};
  EdgeId bridge = kNoEdge;
  std::size_t copy_size = 0;  // vertices per copy, wired vertex included
};
CounterexampleGraph counterexample_graph(int radius, Limits limits = {});

/// Component labels. Each label is the smallest vertex id of its component;
/// vertices outside the subgraph carry kNoVertex.
struct ComponentMap {
  std::vector<Vertex> labels;
  std::size_t component_count = 0;

  bool contains(Vertex v) const { return labels[v] != kNoVertex; }
  bool same(Vertex u, Vertex v) const {
    return labels[u] != kNoVertex && labels[u] == labels[v];
  }
  /// Members grouped by component, components ordered by label.
  std::vector<std::vector<Vertex>> groups() const;
};

/// Subgraph of G keeping every edge whose endpoints share a component.
struct InducedComponentGraph {
  Mask edge_mask;
  ComponentMap components;
};

/// Labels from a union-find over the masked edges. vertex_mask selects the
/// vertex set (empty = all); masked edges must stay inside it.
template <WalkableGraph G>
ComponentMap components(const G& g, const Mask& edge_mask, const Mask& vertex_mask = {}) {
  const std::size_t n = g.vertex_count();
  if (edge_mask.size() != g.edge_count())
    throw ContractViolation("components: edge mask size does not match the graph");
  if (!vertex_mask.empty() && vertex_mask.size() != n)
    throw ContractViolation("components: vertex mask size does not match the graph");
  const auto in_set = [&](Vertex v) { return vertex_mask.empty() || vertex_mask[v] != 0; };
  DisjointSet dsu(n);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!edge_mask[e]) continue;
    const auto [u, v] = g.endpoints(e);
    if (!in_set(u) || !in_set(v))
      throw ContractViolation("components: masked edge leaves the vertex set");
    dsu.unite(u, v);
  }
  ComponentMap map;
  map.labels.assign(n, kNoVertex);
  std::vector<Vertex> label_of_root(n, kNoVertex);
  for (Vertex v = 0; v < n; ++v) {
    if (!in_set(v)) continue;
    Vertex& label = label_of_root[dsu.find(v)];
    if (label == kNoVertex) {
      label = v;  // ascending scan: first member seen is the smallest id
      ++map.component_count;
    }
    map.labels[v] = label;
  }
  return map;
}

template <WalkableGraph G>
InducedComponentGraph induced_component_graph(const G& g, const ComponentMap& components) {
  if (components.labels.size() != g.vertex_count())
    throw ContractViolation("induced_component_graph: vertex set does not match the graph");
  InducedComponentGraph out;
  out.edge_mask.assign(g.edge_count(), 0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto [u, v] = g.endpoints(e);
    out.edge_mask[e] = components.same(u, v) ? 1 : 0;
  }
  out.components = components;
  return out;
}

/// Explicit subgraph on a vertex list with compact ids (local i is
/// host_vertex[i]); keeps the masked edges (all edges for an empty mask)
/// with both endpoints in the list.
struct Subgraph {
  Graph graph;
  std::vector<Vertex> host_vertex;
  std::vector<EdgeId> host_edge;
  std::vector<Vertex> local_vertex;  // host -> local, kNoVertex outside

  Vertex local(Vertex host) const { return local_vertex[host]; }
};

template <WalkableGraph G>
Subgraph extract_subgraph(const G& g, std::span<const Vertex> vertices, const Mask& edge_mask) {
  Subgraph sub;
  sub.host_vertex.assign(vertices.begin(), vertices.end());
  sub.local_vertex.assign(g.vertex_count(), kNoVertex);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (sub.local_vertex[vertices[i]] != kNoVertex)
      throw ContractViolation("extract_subgraph: repeated vertex");
    sub.local_vertex[vertices[i]] = static_cast<Vertex>(i);
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (const Vertex host : vertices) {
    for (std::size_t k = 0; k < g.degree(host); ++k) {
      const Incidence inc = g.incidence(host, k);
      if (!edge_mask.empty() && !edge_mask[inc.edge]) continue;
      const auto [a, b] = g.endpoints(inc.edge);
      if (a != host) continue;  // count each edge once, from its first endpoint
      const Vertex la = sub.local_vertex[a];
      const Vertex lb = sub.local_vertex[b];
      if (la == kNoVertex || lb == kNoVertex) continue;
      edges.emplace_back(la, lb);
      sub.host_edge.push_back(inc.edge);
    }
  }
  std::optional<Vertex> wired;
  if (auto w = g.wired_vertex(); w && sub.local_vertex[*w] != kNoVertex)
    wired = sub.local_vertex[*w];
  sub.graph = Graph(vertices.size(), std::move(edges), wired);
  return sub;
}

/// "n m [wired_id]" header, then m lines "u v"; ids 0-based.
Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);

/// Checked (2r+1)^d with the vertex budget applied.
std::uint64_t lattice_box_size(int dimension, int radius, Limits limits = {});

}  // namespace forestlab
