#include "forestlab/forest_analysis.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "forestlab/stats.hpp"

namespace forestlab {

RayDecomposition ray_decompose(const SpanningForest& forest, Vertex v, double drop_fraction) {
  if (v >= forest.size() || !forest.contains(v))
    throw ContractViolation("ray_decompose: vertex outside the forest");
  if (drop_fraction < 0 || drop_fraction >= 1)
    throw ContractViolation("ray_decompose: drop fraction must lie in [0, 1)");
  RayDecomposition dec;
  for (Vertex u = v; u != kNoVertex; u = forest.parent[u]) dec.ray.push_back(u);
  dec.bush_of.assign(forest.size(), kNoBush);
  for (std::uint32_t i = 0; i < dec.ray.size(); ++i) dec.bush_of[dec.ray[i]] = i;

  const Vertex label = forest.components.labels[v];
  std::vector<Vertex> chain;
  for (Vertex u = 0; u < forest.size(); ++u) {
    if (forest.components.labels[u] != label) continue;
    dec.tree.push_back(u);
    chain.clear();
    Vertex w = u;
    while (dec.bush_of[w] == kNoBush) {
      chain.push_back(w);
      w = forest.parent[w];
    }
    for (const Vertex x : chain) dec.bush_of[x] = dec.bush_of[w];
  }
  dec.bushes.resize(dec.ray.size());
  for (const Vertex u : dec.tree) dec.bushes[dec.bush_of[u]].push_back(u);
  const auto dropped = static_cast<std::size_t>(std::floor(drop_fraction * dec.ray.size()));
  dec.reported = std::max<std::size_t>(1, dec.ray.size() - dropped);
  return dec;
}

std::uint64_t JoinStatistics::count(std::uint32_t j, std::uint32_t l, std::uint32_t n) const {
  if (j > n) return 0;
  return static_cast<std::uint64_t>(std::count_if(joins.begin(), joins.end(), [&](const Join& e) {
    return e.near == n - j && e.far == n + l;
  }));
}

std::uint64_t JoinStatistics::tail_sum(std::uint32_t n, std::uint32_t m) const {
  return static_cast<std::uint64_t>(std::count_if(joins.begin(), joins.end(), [&](const Join& e) {
    return e.near <= n && e.far >= static_cast<std::uint64_t>(n) + m;
  }));
}

template <WalkableGraph G>
JoinStatistics join_counts(const G& g, const RayDecomposition& dec) {
  if (dec.bush_of.size() != g.vertex_count())
    throw ContractViolation("join_counts: decomposition does not match the graph");
  JoinStatistics stats;
  for (const Vertex x : dec.tree) {
    for (std::size_t k = 0; k < g.degree(x); ++k) {
      const Incidence inc = g.incidence(x, k);
      if (g.endpoints(inc.edge).first != x) continue;  // each edge once
      const std::uint32_t a = dec.bush_of[x];
      const std::uint32_t b = dec.bush_of[inc.to];
      if (b == kNoBush || a == b) continue;
      stats.joins.push_back({inc.edge, std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(stats.joins.begin(), stats.joins.end(),
            [](const auto& p, const auto& q) { return p.edge < q.edge; });
  return stats;
}

template <WalkableGraph G>
JoinStatistics cut_sets_and_J(const G& g, const RayDecomposition& dec) {
  JoinStatistics stats = join_counts(g, dec);
  const std::size_t last = dec.last_index();
  stats.cuts.assign(last, {});
  stats.J.assign(last, 0.0);
  stats.cut_membership.assign(stats.joins.size(), 0);
  for (std::size_t k = 0; k < last; ++k) {
    for (std::size_t i = 0; i < stats.joins.size(); ++i) {
      const auto [x, y] = g.endpoints(stats.joins[i].edge);
      if ((dec.bush_of[x] <= k) != (dec.bush_of[y] <= k)) {
        stats.cuts[k].push_back(stats.joins[i].edge);
        ++stats.cut_membership[i];
        stats.J[k] += JoinStatistics::multiplicity(stats.joins[i]);
      }
    }
  }
  return stats;
}

void validate_cut_sets(const Subgraph& tree_graph, const RayDecomposition& dec,
                       const JoinStatistics& stats) {
  absl::flat_hash_map<EdgeId, EdgeId> local_edge;
  for (EdgeId e = 0; e < tree_graph.host_edge.size(); ++e) local_edge[tree_graph.host_edge[e]] = e;
  std::vector<Vertex> ray_local;
  for (const Vertex u : dec.ray) ray_local.push_back(tree_graph.local(u));
  for (std::size_t k = 0; k < stats.cuts.size(); ++k) {
    CutSetFamily family;
    family.cuts.emplace_back();
    for (const EdgeId e : stats.cuts[k]) {
      const auto it = local_edge.find(e);
      if (it == local_edge.end()) throw DomainError("cut set " + std::to_string(k) + " leaves the tree graph");
      family.cuts.back().push_back(it->second);
    }
    const std::span<const Vertex> all(ray_local);
    try {
      family.validate(tree_graph.graph, all.first(k + 1), all.subspan(k + 1));
    } catch (const DomainError&) {
      throw DomainError("cut set C_" + std::to_string(k) + " does not separate the ray");
    }
  }
}

template <WalkableGraph G>
std::uint64_t inter_component_joins(const G& g, const SpanningForest& forest, Vertex u, Vertex v) {
  if (!forest.contains(u) || !forest.contains(v))
    throw ContractViolation("inter_component_joins: vertex outside the forest");
  const auto& labels = forest.components.labels;
  if (labels[u] == labels[v]) return 0;
  std::uint64_t count = 0;
  for (Vertex x = 0; x < forest.size(); ++x) {
    if (labels[x] != labels[u]) continue;
    for (std::size_t k = 0; k < g.degree(x); ++k) {
      if (labels[g.incidence(x, k).to] == labels[v]) ++count;
    }
  }
  return count;
}

template <WalkableGraph G>
std::vector<GrowthRow> resistance_growth_profile(const G& g, const SpanningForest& forest,
                                                 Vertex v, std::size_t n_max,
                                                 double drop_fraction) {
  const RayDecomposition dec = ray_decompose(forest, v, drop_fraction);
  const JoinStatistics stats = cut_sets_and_J(g, dec);
  const Subgraph sub = induced_tree_graph(g, dec);
  const GroundedLaplacian laplacian(sub.graph, sub.local(v));
  std::vector<GrowthRow> rows;
  double lower = 0;
  const std::size_t n_end = std::min(n_max, dec.reported - 1);
  for (std::size_t n = 1; n <= n_end; ++n) {
    lower += 1.0 / stats.J[n - 1];
    rows.push_back({n, laplacian.resistance_to(sub.local(dec.ray[n])), lower});
  }
  return rows;
}

RecurrenceRow recurrence_row(const LatticeBox& box, const SpanningForest& forest, Vertex v,
                             double drop_fraction) {
  const RayDecomposition dec = ray_decompose(forest, v, drop_fraction);
  const JoinStatistics stats = cut_sets_and_J(box, dec);
  RecurrenceRow row;
  row.radius = box.radius();
  row.component_size = dec.tree.size();
  double partial = 0;
  for (std::size_t k = 0; k + 1 < dec.reported; ++k) {
    partial += 1.0 / static_cast<double>(stats.cuts[k].size());
    row.cut_partial_sums.push_back(partial);
  }
  if (box.on_boundary(v)) return row;  // resistance 0
  const Subgraph sub = induced_tree_graph(box, dec);
  std::vector<Vertex> boundary;
  for (const Vertex u : dec.tree) {
    if (box.on_boundary(u)) boundary.push_back(sub.local(u));
  }
  const Vertex source[] = {sub.local(v)};
  row.resistance = effective_resistance(sub.graph, source, boundary);
  return row;
}

std::vector<RecurrenceRow> recurrence_diagnostic(int dimension, std::span<const int> radii,
                                                 std::span<const int> v, RngStream& rng,
                                                 double drop_fraction) {
  std::vector<RecurrenceRow> rows;
  for (const int r : radii) {
    const LatticeBox box({dimension, r, Boundary::Wired});
    if (!box.contains(v)) throw DomainError("recurrence_diagnostic: point outside the box of radius " + std::to_string(r));
    const SpanningForest forest = wsf_wired_box(box, rng);
    rows.push_back(recurrence_row(box, forest, box.id_of(v), drop_fraction));
  }
  return rows;
}

EnvelopeFit fit_join_envelope(std::span<const std::pair<std::uint32_t, std::uint32_t>> grid,
                              std::span<const std::vector<double>> per_replica,
                              double confidence) {
  const std::size_t k = grid.size();
  if (k == 0 || per_replica.empty()) throw ContractViolation("fit_join_envelope: empty input");
  EnvelopeFit fit;
  fit.mean.assign(k, 0.0);
  for (const auto& row : per_replica) {
    if (row.size() != k) throw ContractViolation("fit_join_envelope: ragged replica rows");
    for (std::size_t i = 0; i < k; ++i) fit.mean[i] += row[i];
  }
  for (double& m : fit.mean) m /= static_cast<double>(per_replica.size());

  std::vector<double> x(k), m(k);
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = static_cast<double>(grid[i].first) / grid[i].second;
    m[i] = grid[i].second;
  }
  const OriginFit origin = fit_through_origin(x, fit.mean);
  fit.constant = origin.slope;
  fit.residual.resize(k);
  for (std::size_t i = 0; i < k; ++i) fit.residual[i] = -origin.residuals[i];

  double m_bar = 0;
  for (const double v : m) m_bar += v / k;
  double sxx = 0, xx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (m[i] - m_bar) * (m[i] - m_bar);
    xx += x[i] * x[i];
  }
  if (sxx == 0 || xx == 0) return fit;
  // trend = a . y with a = (w.x / |x|^2) x - w, w_i = (m_i - m_bar) / sxx.
  std::vector<double> w(k), a(k);
  double wx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    w[i] = (m[i] - m_bar) / sxx;
    wx += w[i] * x[i];
  }
  for (std::size_t i = 0; i < k; ++i) a[i] = wx / xx * x[i] - w[i];
  RunningStats trend;
  for (const auto& row : per_replica) {
    double t = 0;
    for (std::size_t i = 0; i < k; ++i) t += a[i] * row[i];
    trend.add(t);
  }
  fit.trend = trend.mean();
  fit.trend_half_width = trend.half_width(confidence);
  return fit;
}

template JoinStatistics join_counts(const Graph&, const RayDecomposition&);
template JoinStatistics join_counts(const LatticeBox&, const RayDecomposition&);
template JoinStatistics cut_sets_and_J(const Graph&, const RayDecomposition&);
template JoinStatistics cut_sets_and_J(const LatticeBox&, const RayDecomposition&);
template std::uint64_t inter_component_joins(const Graph&, const SpanningForest&, Vertex, Vertex);
template std::uint64_t inter_component_joins(const LatticeBox&, const SpanningForest&, Vertex,
                                             Vertex);
template std::vector<GrowthRow> resistance_growth_profile(const Graph&, const SpanningForest&,
                                                          Vertex, std::size_t, double);
template std::vector<GrowthRow> resistance_growth_profile(const LatticeBox&,
                                                          const SpanningForest&, Vertex,
                                                          std::size_t, double);

}  // namespace forestlab
