#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "forestlab/graph.hpp"
#include "forestlab/rng.hpp"
#include "forestlab/stats.hpp"
#include "forestlab/wilson.hpp"

namespace forestlab {

/// Independent uniform spanning tree on every component of K; each tree is
/// rooted at its component label. On a finite graph this is the free
/// spanning forest of K.
SpanningForest usf_on_components(const Graph& g, const InducedComponentGraph& k, RngStream& rng);

/// Vertices within graph distance `radius` of center, never passing
/// through the wired vertex; ascending.
std::vector<Vertex> graph_ball(const Graph& g, Vertex center, int radius);
std::vector<Vertex> lattice_ball(const LatticeBox& box, int radius);

/// Restricted forests seen with one induced-component graph K of the
/// restriction to the ball: K's edge ids plus its partition of the ball.
struct ConditionalLawTable {
  std::vector<EdgeId> key_edges;
  std::vector<Vertex> partition;  // component label per ball vertex, in ball order
  struct Row {
    std::vector<EdgeId> forest;
    std::uint64_t count = 0;
    double probability = 0;  // within the group
  };
  std::vector<Row> rows;
  BigInt support;  // product of spanning-tree counts of K's components
  bool equal_counts = false;
  bool full_support = false;
};

struct ExactConditionalReport {
  std::uint64_t tree_count = 0;
  std::vector<ConditionalLawTable> groups;
  bool passed = false;
};

/// Enumerates every spanning tree of the small wired graph g, restricts it
/// to the ball, groups by K and checks the per-group counts for equality.
ExactConditionalReport exact_conditional_test(const Graph& g, std::span<const Vertex> ball,
                                              std::size_t max_edges = 32);

struct ResampleOptions {
  unsigned threads = 1;
  std::size_t bootstrap_resamples = 1000;
  double confidence = 0.999;
  double significance = 1e-3;
  double min_expected = 5;         // cells below this pool in the chi-square
  double sparse_mass_limit = 0.2;  // pooled mass above this triggers coarsening
  double max_ball_fraction = 0.25;
};

struct ResampleCell {
  std::uint64_t key = 0;  // bit i set: i-th ball edge present
  double direct = 0;
  double resampled = 0;
};

struct StatisticalResampleReport {
  std::size_t ball_vertices = 0;
  std::vector<EdgeId> ball_edges;
  std::uint64_t replicas = 0;
  std::vector<ResampleCell> cells;
  double tv = 0;
  BootstrapResult bootstrap;
  ChiSquareResult chi_square;
  bool coarsened = false;
  double sparse_mass = 0;
  std::vector<double> marginal_direct;
  std::vector<double> marginal_resampled;
  double max_marginal_z = 0;
  std::uint64_t partition_mismatches = 0;
  bool passed = false;
};

/// Pipeline A samples WSF restricted to the ball; pipeline B samples it
/// again, forms K of the restriction and resamples USF(K). Both use partial
/// Wilson runs that grow only the ball's branches, which fixes the forest
/// inside the ball exactly.
StatisticalResampleReport statistical_resample_test(const LatticeBoxSpec& spec, int ball_radius,
                                                    std::uint64_t replicas, RngStream& rng,
                                                    const ResampleOptions& options = {});

}  // namespace forestlab
