#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "forestlab/errors.hpp"
#include "forestlab/graph.hpp"
#include "forestlab/lattice.hpp"
#include "forestlab/rng.hpp"
#include "forestlab/walk.hpp"

namespace forestlab {

/// Parent-pointer forest over the vertices of a host graph. Vertices outside
/// the forest (the deleted wired vertex) carry kNoVertex labels.
struct SpanningForest {
  std::vector<Vertex> parent;       // kNoVertex at roots and absent vertices
  std::vector<EdgeId> parent_edge;  // kNoEdge likewise
  std::vector<Vertex> roots;        // ascending
  ComponentMap components;

  std::size_t size() const noexcept { return parent.size(); }
  bool contains(Vertex v) const { return components.contains(v); }
  bool is_root(Vertex v) const { return contains(v) && parent[v] == kNoVertex; }
  Vertex root_of(Vertex v) const;
  std::size_t edge_count() const;
  /// Sorted edge ids.
  std::vector<EdgeId> edges() const;
  Mask edge_mask(std::size_t host_edge_count) const;
};

/// Builds roots and component labels from parent arrays; present marks the
/// forest's vertex set (empty = all). Throws ContractViolation on a cycle.
SpanningForest make_forest(std::vector<Vertex> parent, std::vector<EdgeId> parent_edge,
                           const Mask& present = {});

/// Checks every parent edge against the host graph.
template <WalkableGraph G>
void validate_forest(const G& g, const SpanningForest& f) {
  if (f.size() != g.vertex_count()) throw ContractViolation("forest does not match the graph");
  for (Vertex v = 0; v < f.size(); ++v) {
    if (!f.contains(v) || f.is_root(v)) continue;
    const auto [a, b] = g.endpoints(f.parent_edge[v]);
    const Vertex p = f.parent[v];
    if (!((a == v && b == p) || (a == p && b == v)))
      throw ContractViolation("forest parent edge does not join the vertex to its parent");
    if (!f.contains(p)) throw ContractViolation("forest parent lies outside the forest");
  }
}

/// Wilson's algorithm with last-exit successor tables. State is reset
/// sparsely, so repeated partial runs on a large graph only pay for the
/// vertices they touch.
template <WalkableGraph G>
class WilsonSampler {
 public:
  explicit WilsonSampler(const G& g)
      : g_(&g),
        in_tree_(g.vertex_count(), 0),
        next_(g.vertex_count(), kNoVertex),
        next_edge_(g.vertex_count(), kNoEdge),
        parent_(g.vertex_count(), kNoVertex),
        parent_edge_(g.vertex_count(), kNoEdge) {}

  void reset() {
    for (const Vertex v : touched_) {
      in_tree_[v] = 0;
      parent_[v] = kNoVertex;
      parent_edge_[v] = kNoEdge;
    }
    touched_.clear();
    steps_ = 0;
  }

  void add_root(Vertex r) { mark(r); }

  /// Puts v in the tree with a fixed parent edge (the contracted trunk).
  void attach(Vertex v, Vertex parent, EdgeId edge) {
    mark(v);
    parent_[v] = parent;
    parent_edge_[v] = edge;
  }

  /// Loop-erased branch from start to the current tree.
  void grow(Vertex start, RngStream& rng) {
    Vertex v = start;
    while (!in_tree_[v]) {
      if (++steps_ > step_cap_)
        throw StepBudgetExceeded("wilson: walk did not reach the tree within the step cap");
      const std::size_t deg = g_->degree(v);
      if (deg == 0) throw DomainError("wilson: walk reached an isolated vertex");
      const Incidence inc = g_->incidence(v, rng.uniform_index(deg));
      next_[v] = inc.to;
      next_edge_[v] = inc.edge;
      v = inc.to;
    }
    for (v = start; !in_tree_[v]; v = next_[v]) {
      mark(v);
      parent_[v] = next_[v];
      parent_edge_[v] = next_edge_[v];
    }
  }

  void grow_all(std::span<const Vertex> order, RngStream& rng) {
    for (const Vertex v : order) grow(v, rng);
  }

  void grow_all(RngStream& rng) {
    for (Vertex v = 0; v < g_->vertex_count(); ++v) grow(v, rng);
  }

  bool in_tree(Vertex v) const { return in_tree_[v] != 0; }
  Vertex parent(Vertex v) const { return parent_[v]; }
  EdgeId parent_edge(Vertex v) const { return parent_edge_[v]; }
  std::uint64_t steps() const noexcept { return steps_; }
  void set_step_cap(std::uint64_t cap) { step_cap_ = cap; }

  /// The grown forest. With drop_wired, the wired vertex leaves the vertex
  /// set and its children become roots.
  SpanningForest forest(bool drop_wired) const {
    std::vector<Vertex> parent = parent_;
    std::vector<EdgeId> parent_edge = parent_edge_;
    Mask present(in_tree_);
    if (drop_wired) {
      const auto wired = g_->wired_vertex();
      if (!wired) throw ContractViolation("wilson: no wired vertex to drop");
      present[*wired] = 0;
      for (Vertex v = 0; v < parent.size(); ++v) {
        if (parent[v] == *wired) {
          parent[v] = kNoVertex;
          parent_edge[v] = kNoEdge;
        }
      }
    }
    return make_forest(std::move(parent), std::move(parent_edge), present);
  }

 private:
  void mark(Vertex v) {
    if (!in_tree_[v]) {
      in_tree_[v] = 1;
      touched_.push_back(v);
    }
  }

  const G* g_;
  Mask in_tree_;
  std::vector<Vertex> next_;
  std::vector<EdgeId> next_edge_;
  std::vector<Vertex> parent_;
  std::vector<EdgeId> parent_edge_;
  std::vector<Vertex> touched_;
  std::uint64_t steps_ = 0;
  std::uint64_t step_cap_ = std::uint64_t{1} << 40;
};

/// True iff every vertex reaches one of the roots.
template <WalkableGraph G>
bool reaches_roots(const G& g, std::span<const Vertex> roots) {
  Mask seen(g.vertex_count(), 0);
  std::vector<Vertex> stack(roots.begin(), roots.end());
  for (const Vertex r : roots) seen.at(r) = 1;
  std::size_t count = roots.size();
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (std::size_t k = 0; k < g.degree(v); ++k) {
      const Vertex w = g.incidence(v, k).to;
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == g.vertex_count();
}

/// Uniform spanning forest rooted at a set: each tree holds exactly one root.
template <WalkableGraph G>
SpanningForest wilson_forest(const G& g, std::span<const Vertex> roots,
                             std::span<const Vertex> order, RngStream& rng) {
  if (roots.empty()) throw ContractViolation("wilson_forest: empty root set");
  if (!reaches_roots(g, roots)) throw DomainError("wilson_forest: some vertex cannot reach a root");
  WilsonSampler<G> sampler(g);
  for (const Vertex r : roots) sampler.add_root(r);
  sampler.grow_all(order, rng);
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (!sampler.in_tree(v)) throw ContractViolation("wilson_forest: order misses a vertex");
  }
  return sampler.forest(false);
}

/// Uniform spanning tree; order must list every vertex (any order).
template <WalkableGraph G>
SpanningForest wilson_ust(const G& g, Vertex root, std::span<const Vertex> order, RngStream& rng) {
  const Vertex roots[] = {root};
  try {
    return wilson_forest(g, std::span<const Vertex>(roots), order, rng);
  } catch (const DomainError&) {
    throw DomainError("wilson_ust: graph is disconnected");
  }
}

std::vector<Vertex> identity_order(std::size_t n);

/// UST of the wired box with the wired vertex deleted. Vertices whose tree
/// path first reaches the wired vertex become the roots.
SpanningForest wsf_wired_box(const LatticeBox& box, RngStream& rng);
SpanningForest wsf_wired_box(const LatticeBoxSpec& spec, RngStream& rng, Limits limits = {});

struct TwoSidedWsfSample {
  SpanningForest forest;
  Path trunk;  // box vertices, negative end first
  std::size_t trunk_origin_offset = 0;
  std::optional<EdgeId> origin_edge;  // set by the coupling sampler
  bool clipped = false;    // trunk left the box
  bool reentered = false;  // trunk came back after leaving (ignored part)
  std::uint64_t attempts = 0;
};

/// Two-sided LERW trunk (clipped to its in-box run through the origin),
/// then Wilson rooted at {trunk, wired vertex}. Trunk parents point toward
/// the positive end, whose last in-box vertex is a root.
TwoSidedWsfSample two_sided_wsf(const LatticeBox& box, const TwoSidedLerwOptions& options,
                                RngStream& rng);

/// Same target law via the first-two-branches construction: the ray of o,
/// one step from o to v off the ray, and v's branch reaching the wired
/// vertex; the edge (o, v) then joins the two trees.
TwoSidedWsfSample two_sided_wsf_coupling(const LatticeBox& box, RngStream& rng,
                                         std::uint64_t attempt_cap = 100'000);

using BigInt = boost::multiprecision::cpp_int;

/// Matrix-tree count with exact Bareiss elimination; 0 when disconnected.
BigInt spanning_tree_count(const Graph& g, std::size_t max_vertices = 600);

/// Every spanning tree as a sorted edge-id list, in lexicographic order.
std::vector<std::vector<EdgeId>> enumerate_spanning_trees(const Graph& g,
                                                          std::size_t max_edges = 20);

/// Plain-text dump: a header line "n k" (host vertex count, forest vertex
/// count), then k lines "v parent edge", roots first as "v -1 -1". Reading
/// stops after k entries, so dumps can be concatenated.
void write_forest(std::ostream& out, const SpanningForest& f);
SpanningForest read_forest(std::istream& in);

}  // namespace forestlab
