#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "forestlab/graph.hpp"
#include "forestlab/resistance.hpp"
#include "forestlab/rng.hpp"
#include "forestlab/wilson.hpp"

namespace forestlab {

inline constexpr std::uint32_t kNoBush = std::numeric_limits<std::uint32_t>::max();

/// Ray of v (its tree path to the root) and the bushes hanging off it:
/// Bush_n holds the vertices whose tree path first meets the ray at Ray(n).
struct RayDecomposition {
  Path ray;
  std::vector<std::uint32_t> bush_of;  // per host vertex; kNoBush off the tree
  std::vector<std::vector<Vertex>> bushes;
  std::vector<Vertex> tree;    // vertices of v's tree, ascending
  std::size_t reported = 0;  // ray indices below this are reported

  std::size_t last_index() const { return ray.size() - 1; }
};

/// drop_fraction of the ray's far end is excluded from reporting (boundary
/// effects); the decomposition itself always covers the whole tree.
RayDecomposition ray_decompose(const SpanningForest& forest, Vertex v, double drop_fraction = 0.1);

/// Edges of G inside v's tree joining two different bushes, plus the cut
/// sets C_k (edges joining Bush_0..Bush_k to the later bushes).
struct JoinStatistics {
  struct Join {
    EdgeId edge;
    std::uint32_t near;  // smaller bush index
    std::uint32_t far;
  };
  std::vector<Join> joins;
  std::vector<std::vector<EdgeId>> cuts;      // C_0 .. C_{N-1}; empty until cut_sets_and_J
  std::vector<std::uint32_t> cut_membership;  // per join: #{k : edge in C_k}
  std::vector<double> J;                      // J_k = sum of j(e) over C_k

  /// Edges joining Bush_{n-j} and Bush_{n+l}.
  std::uint64_t count(std::uint32_t j, std::uint32_t l, std::uint32_t n) const;
  /// sum_{0<=j<=n} sum_{l>=m} N_{j,l} at index n.
  std::uint64_t tail_sum(std::uint32_t n, std::uint32_t m) const;
  /// j(e) = far - near for a joining edge.
  static std::uint32_t multiplicity(const Join& join) { return join.far - join.near; }
};

template <WalkableGraph G>
JoinStatistics join_counts(const G& g, const RayDecomposition& dec);

/// join_counts plus explicit C_k sets, per-edge membership counts and J_k.
template <WalkableGraph G>
JoinStatistics cut_sets_and_J(const G& g, const RayDecomposition& dec);

/// The tree's induced subgraph in G (every G-edge with both ends in v's tree).
template <WalkableGraph G>
Subgraph induced_tree_graph(const G& g, const RayDecomposition& dec) {
  return extract_subgraph(g, std::span<const Vertex>(dec.tree), Mask{});
}

/// Checks that each C_k separates Ray[0, k] from Ray[k+1, N] in the tree's
/// induced subgraph; DomainError naming k otherwise.
void validate_cut_sets(const Subgraph& tree_graph, const RayDecomposition& dec,
                       const JoinStatistics& stats);

/// Number of G-edges between the components of u and v (0 if shared).
template <WalkableGraph G>
std::uint64_t inter_component_joins(const G& g, const SpanningForest& forest, Vertex u, Vertex v);

struct GrowthRow {
  std::size_t n = 0;
  double resistance = 0;   // R_eff(v, Ray(n)) in the tree's induced subgraph
  double lower_bound = 0;  // sum_{k<n} 1/J_k
};

template <WalkableGraph G>
std::vector<GrowthRow> resistance_growth_profile(const G& g, const SpanningForest& forest,
                                                 Vertex v, std::size_t n_max,
                                                 double drop_fraction = 0.1);

struct RecurrenceRow {
  int radius = 0;
  double resistance = 0;  // v to the component's box-boundary vertices
  std::vector<double> cut_partial_sums;  // sum_{k<=i} 1/#C_k along the ray
  std::size_t component_size = 0;
};

/// One wired-box forest per radius, tracking the component of the point v.
std::vector<RecurrenceRow> recurrence_diagnostic(int dimension, std::span<const int> radii,
                                                 std::span<const int> v, RngStream& rng,
                                                 double drop_fraction = 0.1);

RecurrenceRow recurrence_row(const LatticeBox& box, const SpanningForest& forest, Vertex v,
                             double drop_fraction = 0.1);

/// Shape fit of mean tail sums S(n, m) against n/m over a grid. The
/// constant is the least-squares slope through the origin; the residual
/// trend is the least-squares slope of (C n/m - S) against m. Both are
/// linear in the per-replica values, so the trend carries a replica CI.
struct EnvelopeFit {
  double constant = 0;
  double trend = 0;
  double trend_half_width = 0;
  std::vector<double> mean;  // per grid point
  std::vector<double> residual;
};

EnvelopeFit fit_join_envelope(std::span<const std::pair<std::uint32_t, std::uint32_t>> grid,
                              std::span<const std::vector<double>> per_replica,
                              double confidence = 0.999);

}  // namespace forestlab
