#include "forestlab/resample.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <string>

#include "forestlab/parallel.hpp"

namespace forestlab {

SpanningForest usf_on_components(const Graph& g, const InducedComponentGraph& k, RngStream& rng) {
  const ComponentMap& comps = k.components;
  if (comps.labels.size() != g.vertex_count() || k.edge_mask.size() != g.edge_count())
    throw ContractViolation("usf_on_components: K does not match the graph");
  std::vector<Vertex> vertices;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (comps.contains(v)) vertices.push_back(v);
  }
  const Subgraph sub = extract_subgraph(g, std::span<const Vertex>(vertices), k.edge_mask);
  WilsonSampler<Graph> sampler(sub.graph);
  for (const Vertex v : vertices) {
    if (comps.labels[v] == v) sampler.add_root(sub.local(v));
  }
  sampler.grow_all(rng);

  std::vector<Vertex> parent(g.vertex_count(), kNoVertex);
  std::vector<EdgeId> parent_edge(g.vertex_count(), kNoEdge);
  Mask present(g.vertex_count(), 0);
  for (Vertex local = 0; local < vertices.size(); ++local) {
    const Vertex host = vertices[local];
    present[host] = 1;
    if (sampler.parent(local) == kNoVertex) continue;
    parent[host] = sub.host_vertex[sampler.parent(local)];
    parent_edge[host] = sub.host_edge[sampler.parent_edge(local)];
  }
  return make_forest(std::move(parent), std::move(parent_edge), present);
}

std::vector<Vertex> graph_ball(const Graph& g, Vertex center, int radius) {
  if (center >= g.vertex_count()) throw ContractViolation("graph_ball: center out of range");
  const auto wired = g.wired_vertex();
  if (wired && center == *wired) throw ContractViolation("graph_ball: center is the wired vertex");
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<Vertex> queue{center};
  dist[center] = 0;
  std::vector<Vertex> out;
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop_front();
    out.push_back(v);
    if (dist[v] == radius) continue;
    for (const Incidence inc : g.incidences(v)) {
      if (dist[inc.to] >= 0 || (wired && inc.to == *wired)) continue;
      dist[inc.to] = dist[v] + 1;
      queue.push_back(inc.to);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Vertex> lattice_ball(const LatticeBox& box, int radius) {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < box.box_vertex_count(); ++v) {
    if (box.l1_norm(v) <= radius) out.push_back(v);
  }
  return out;
}

namespace {

// Component label (smallest member index) per ball position under an edge
// subset given as local endpoint pairs.
std::vector<Vertex> ball_partition(std::size_t size,
                                   std::span<const std::pair<Vertex, Vertex>> edges) {
  DisjointSet dsu(size);
  for (const auto& [u, v] : edges) dsu.unite(u, v);
  std::vector<Vertex> label(size), first(size, kNoVertex);
  for (Vertex i = 0; i < size; ++i) {
    Vertex& f = first[dsu.find(i)];
    if (f == kNoVertex) f = i;
    label[i] = f;
  }
  return label;
}

}  // namespace

ExactConditionalReport exact_conditional_test(const Graph& g, std::span<const Vertex> ball,
                                              std::size_t max_edges) {
  std::vector<Vertex> local(g.vertex_count(), kNoVertex);
  for (Vertex i = 0; i < ball.size(); ++i) {
    if (ball[i] >= g.vertex_count() || local[ball[i]] != kNoVertex)
      throw ContractViolation("exact_conditional_test: bad ball");
    local[ball[i]] = i;
  }
  std::vector<EdgeId> ball_edges;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto [u, v] = g.endpoints(e);
    if (local[u] != kNoVertex && local[v] != kNoVertex) ball_edges.push_back(e);
  }
  const auto trees = enumerate_spanning_trees(g, max_edges);

  using Key = std::pair<std::vector<EdgeId>, std::vector<Vertex>>;
  std::map<Key, std::map<std::vector<EdgeId>, std::uint64_t>> groups;
  std::vector<std::pair<Vertex, Vertex>> local_edges;
  for (const auto& tree : trees) {
    std::vector<EdgeId> restricted;
    local_edges.clear();
    for (const EdgeId e : tree) {
      const auto [u, v] = g.endpoints(e);
      if (local[u] == kNoVertex || local[v] == kNoVertex) continue;
      restricted.push_back(e);
      local_edges.emplace_back(local[u], local[v]);
    }
    const auto partition = ball_partition(ball.size(), local_edges);
    std::vector<EdgeId> k_edges;
    for (const EdgeId e : ball_edges) {
      const auto [u, v] = g.endpoints(e);
      if (partition[local[u]] == partition[local[v]]) k_edges.push_back(e);
    }
    ++groups[{std::move(k_edges), partition}][restricted];
  }

  ExactConditionalReport report;
  report.tree_count = trees.size();
  report.passed = true;
  for (const auto& [key, forests] : groups) {
    ConditionalLawTable table;
    table.key_edges = key.first;
    table.partition = key.second;
    std::uint64_t total = 0;
    for (const auto& [forest, count] : forests) total += count;
    for (const auto& [forest, count] : forests)
      table.rows.push_back({forest, count, static_cast<double>(count) / total});
    table.equal_counts = std::all_of(table.rows.begin(), table.rows.end(), [&](const auto& r) {
      return r.count == table.rows.front().count;
    });
    // Support of USF(K): product over K's components of their tree counts.
    table.support = 1;
    std::map<Vertex, std::vector<Vertex>> members;
    for (Vertex i = 0; i < ball.size(); ++i) members[table.partition[i]].push_back(i);
    for (const auto& [label, part] : members) {
      std::vector<Vertex> index(ball.size(), kNoVertex);
      for (Vertex j = 0; j < part.size(); ++j) index[part[j]] = j;
      std::vector<std::pair<Vertex, Vertex>> edges;
      for (const EdgeId e : table.key_edges) {
        const auto [u, v] = g.endpoints(e);
        if (index[local[u]] != kNoVertex) edges.emplace_back(index[local[u]], index[local[v]]);
      }
      table.support *= spanning_tree_count(Graph(part.size(), std::move(edges)));
    }
    table.full_support = BigInt(table.rows.size()) == table.support;
    report.passed = report.passed && table.equal_counts && table.full_support;
    report.groups.push_back(std::move(table));
  }
  return report;
}

namespace {

struct BallContext {
  const LatticeBox* box;
  std::vector<Vertex> ball;
  std::vector<Vertex> local;  // host -> ball index
  std::vector<EdgeId> edges;  // ball edges, ascending
  std::vector<std::pair<Vertex, Vertex>> local_ends;

  int bit_of(EdgeId e) const {
    const auto it = std::lower_bound(edges.begin(), edges.end(), e);
    return it != edges.end() && *it == e ? static_cast<int>(it - edges.begin()) : -1;
  }
};

std::uint64_t restricted_bits(const BallContext& ctx, const WilsonSampler<LatticeBox>& sampler) {
  std::uint64_t bits = 0;
  for (const Vertex x : ctx.ball) {
    const EdgeId e = sampler.parent_edge(x);
    if (e == kNoEdge) continue;
    const int bit = ctx.bit_of(e);
    if (bit >= 0) bits |= std::uint64_t{1} << bit;
  }
  return bits;
}

std::vector<Vertex> partition_of(const BallContext& ctx, std::uint64_t bits) {
  std::vector<std::pair<Vertex, Vertex>> chosen;
  for (std::size_t i = 0; i < ctx.edges.size(); ++i) {
    if (bits >> i & 1) chosen.push_back(ctx.local_ends[i]);
  }
  return ball_partition(ctx.ball.size(), chosen);
}

struct ChunkCounts {
  absl::flat_hash_map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> cells;
  std::uint64_t mismatches = 0;
};

}  // namespace

StatisticalResampleReport statistical_resample_test(const LatticeBoxSpec& spec, int ball_radius,
                                                    std::uint64_t replicas, RngStream& rng,
                                                    const ResampleOptions& options) {
  if (spec.boundary != Boundary::Wired)
    throw ContractViolation("statistical_resample_test: box must have a wired boundary");
  if (ball_radius < 1 || ball_radius > options.max_ball_fraction * spec.radius)
    throw ContractViolation("statistical_resample_test: ball radius " +
                            std::to_string(ball_radius) + " is not small against box radius " +
                            std::to_string(spec.radius));
  if (replicas == 0) throw ContractViolation("statistical_resample_test: no replicas");
  const LatticeBox box(spec);
  BallContext ctx{&box, lattice_ball(box, ball_radius), {}, {}, {}};
  ctx.local.assign(box.vertex_count(), kNoVertex);
  for (Vertex i = 0; i < ctx.ball.size(); ++i) ctx.local[ctx.ball[i]] = i;
  for (const Vertex x : ctx.ball) {
    for (std::size_t k = 0; k < box.degree(x); ++k) {
      const Incidence inc = box.incidence(x, k);
      if (ctx.local[inc.to] != kNoVertex && box.endpoints(inc.edge).first == x)
        ctx.edges.push_back(inc.edge);
    }
  }
  std::sort(ctx.edges.begin(), ctx.edges.end());
  if (ctx.edges.size() > 64)
    throw ResourceError("statistical_resample_test: more than 64 edges inside the ball");
  for (const EdgeId e : ctx.edges) {
    const auto [u, v] = box.endpoints(e);
    ctx.local_ends.emplace_back(ctx.local[u], ctx.local[v]);
  }

  const RngStream direct_root = rng.substream(0);
  const RngStream resample_root = rng.substream(1);
  auto run_chunk = [&](std::uint64_t begin, std::uint64_t end) {
    ChunkCounts out;
    WilsonSampler<LatticeBox> sampler(box);
    auto restricted_forest = [&](RngStream& stream) {
      sampler.reset();
      sampler.add_root(*box.wired_vertex());
      for (const Vertex x : ctx.ball) sampler.grow(x, stream);
      return restricted_bits(ctx, sampler);
    };
    for (std::uint64_t i = begin; i < end; ++i) {
      RngStream a = direct_root.substream(i);
      ++out.cells[restricted_forest(a)].first;

      RngStream b = resample_root.substream(i);
      const std::uint64_t bits = restricted_forest(b);
      const auto partition = partition_of(ctx, bits);
      std::vector<std::pair<Vertex, Vertex>> k_edges;
      std::vector<int> k_bits;
      for (std::size_t e = 0; e < ctx.edges.size(); ++e) {
        const auto [u, v] = ctx.local_ends[e];
        if (partition[u] == partition[v]) {
          k_edges.emplace_back(u, v);
          k_bits.push_back(static_cast<int>(e));
        }
      }
      const Graph k(ctx.ball.size(), k_edges);
      WilsonSampler<Graph> usf(k);
      for (Vertex j = 0; j < ctx.ball.size(); ++j) {
        if (partition[j] == j) usf.add_root(j);
      }
      usf.grow_all(b);
      std::uint64_t resampled = 0;
      for (Vertex j = 0; j < ctx.ball.size(); ++j) {
        if (usf.parent_edge(j) != kNoEdge) resampled |= std::uint64_t{1} << k_bits[usf.parent_edge(j)];
      }
      if (partition_of(ctx, resampled) != partition) ++out.mismatches;
      ++out.cells[resampled].second;
    }
    return out;
  };
  const auto chunks = parallel_chunks<ChunkCounts>(replicas, options.threads, run_chunk);

  std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> merged;
  StatisticalResampleReport report;
  for (const auto& c : chunks) {
    for (const auto& [key, counts] : c.cells) {
      merged[key].first += counts.first;
      merged[key].second += counts.second;
    }
    report.partition_mismatches += c.mismatches;
  }
  report.ball_vertices = ctx.ball.size();
  report.ball_edges = ctx.edges;
  report.replicas = replicas;
  std::vector<double> a, b;
  double sparse = 0;
  report.marginal_direct.assign(ctx.edges.size(), 0.0);
  report.marginal_resampled.assign(ctx.edges.size(), 0.0);
  for (const auto& [key, counts] : merged) {
    const double x = static_cast<double>(counts.first);
    const double y = static_cast<double>(counts.second);
    report.cells.push_back({key, x, y});
    a.push_back(x);
    b.push_back(y);
    if (x + y < 2 * options.min_expected) sparse += x + y;
    for (std::size_t e = 0; e < ctx.edges.size(); ++e) {
      if (key >> e & 1) {
        report.marginal_direct[e] += x;
        report.marginal_resampled[e] += y;
      }
    }
  }
  const double n = static_cast<double>(replicas);
  for (std::size_t e = 0; e < ctx.edges.size(); ++e) {
    const double pa = report.marginal_direct[e] / n;
    const double pb = report.marginal_resampled[e] / n;
    const double pooled = (pa + pb) / 2;
    const double se = std::sqrt(pooled * (1 - pooled) * 2 / n);
    if (se > 0) report.max_marginal_z = std::max(report.max_marginal_z, std::abs(pa - pb) / se);
    report.marginal_direct[e] = pa;
    report.marginal_resampled[e] = pb;
  }
  report.sparse_mass = sparse / (2 * n);
  report.coarsened = report.sparse_mass > options.sparse_mass_limit;
  report.tv = total_variation(a, b);
  report.chi_square = chi_square_two_sample(a, b, 2 * options.min_expected);
  RngStream boot = rng.substream(2);
  report.bootstrap =
      bootstrap_tv_null(a, b, options.bootstrap_resamples, options.confidence, boot);
  if (report.coarsened) {
    const double edges = static_cast<double>(std::max<std::size_t>(1, ctx.edges.size()));
    report.passed = report.max_marginal_z <= normal_quantile(1 - options.significance / (2 * edges));
  } else {
    report.passed = report.bootstrap.within && report.chi_square.p_value >= options.significance;
  }
  report.passed = report.passed && report.partition_mismatches == 0;
  return report;
}

}  // namespace forestlab
