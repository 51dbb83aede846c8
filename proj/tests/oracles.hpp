#pragma once

// Slow reference implementations used as test oracles. None of them calls
// into the library beyond the Graph container.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "forestlab/graph.hpp"
#include "forestlab/resistance.hpp"

namespace oracle {

using forestlab::EdgeId;
using forestlab::Graph;
using forestlab::Vertex;

inline Vertex find_root(std::vector<Vertex>& up, Vertex v) {
  while (up[v] != v) v = up[v];
  return v;
}

/// Every (n-1)-subset of edges that is acyclic, in lexicographic order.
inline std::vector<std::vector<EdgeId>> spanning_trees(const Graph& g) {
  const std::size_t n = g.vertex_count();
  const std::size_t m = g.edge_count();
  std::vector<std::vector<EdgeId>> out;
  if (n == 0 || m + 1 < n) return out;
  const std::size_t k = n - 1;
  std::vector<EdgeId> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    std::vector<Vertex> up(n);
    std::iota(up.begin(), up.end(), 0);
    bool acyclic = true;
    for (const EdgeId e : pick) {
      const auto [u, v] = g.endpoints(e);
      const Vertex a = find_root(up, u), b = find_root(up, v);
      if (a == b) {
        acyclic = false;
        break;
      }
      up[a] = b;
    }
    if (acyclic) out.push_back(pick);
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == m - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

/// R_eff via the Moore-Penrose pseudo-inverse of the dense Laplacian.
inline double pinv_resistance(const Graph& g, Vertex a, Vertex b) {
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [u, v] : g.edges()) {
    lap(u, u) += 1;
    lap(v, v) += 1;
    lap(u, v) -= 1;
    lap(v, u) -= 1;
  }
  const Eigen::MatrixXd pinv = lap.completeOrthogonalDecomposition().pseudoInverse();
  return pinv(a, a) + pinv(b, b) - 2 * pinv(a, b);
}

/// Random series-parallel network between terminals 0 and 1 with its
/// resistance computed by the series and parallel laws alone.
struct SeriesParallel {
  std::size_t vertex_count = 2;
  std::vector<std::pair<Vertex, Vertex>> edges;
  double resistance = 0;
};

namespace detail {
// Builds a network between s and t, allocating interior vertices from next.
inline double build_sp(std::mt19937_64& gen, int depth, Vertex s, Vertex t, Vertex& next,
                       std::vector<std::pair<Vertex, Vertex>>& edges) {
  std::uniform_int_distribution<int> pick(0, 2);
  const int kind = depth <= 0 ? 0 : pick(gen);
  if (kind == 0) {
    edges.emplace_back(s, t);
    return 1.0;
  }
  if (kind == 1) {
    const Vertex mid = next++;
    return build_sp(gen, depth - 1, s, mid, next, edges) + build_sp(gen, depth - 1, mid, t, next, edges);
  }
  const double r1 = build_sp(gen, depth - 1, s, t, next, edges);
  const double r2 = build_sp(gen, depth - 1, s, t, next, edges);
  return r1 * r2 / (r1 + r2);
}
}  // namespace detail

inline SeriesParallel series_parallel(std::uint64_t seed, int depth) {
  std::mt19937_64 gen(seed);
  SeriesParallel sp;
  Vertex next = 2;
  sp.resistance = detail::build_sp(gen, depth, 0, 1, next, sp.edges);
  sp.vertex_count = next;
  return sp;
}

/// Loop erasure straight from the definition: u_{j+1} = v_{k+1} with k the
/// last index such that v_k = u_j.
inline std::vector<Vertex> loop_erase(const std::vector<Vertex>& p) {
  std::vector<Vertex> u;
  if (p.empty()) return u;
  u.push_back(p[0]);
  while (true) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == u.back()) k = i;
    }
    if (k + 1 >= p.size()) break;
    u.push_back(p[k + 1]);
  }
  return u;
}

/// t is a cut time iff the sets of sites before and after t are disjoint.
inline std::vector<std::size_t> cut_times(const std::vector<Vertex>& p) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < p.size(); ++t) {
    std::set<Vertex> before(p.begin(), p.begin() + t);
    bool ok = true;
    for (std::size_t i = t + 1; i < p.size() && ok; ++i) ok = before.count(p[i]) == 0;
    if (ok) out.push_back(t);
  }
  return out;
}

/// Law of the loop-erased walk from a stopped on hitting b, by evolving the
/// distribution of the running erasure until the unabsorbed mass is below
/// tail (returned in residual).
inline std::map<std::vector<Vertex>, double> lerw_law(const Graph& g, Vertex a, Vertex b,
                                                      double tail, double& residual) {
  std::map<std::vector<Vertex>, double> law;
  std::map<std::vector<Vertex>, double> live{{{a}, 1.0}};
  if (a == b) {
    residual = 0;
    return {{{a}, 1.0}};
  }
  double remaining = 1.0;
  while (remaining > tail) {
    std::map<std::vector<Vertex>, double> next;
    for (const auto& [path, mass] : live) {
      const Vertex v = path.back();
      const double step = mass / static_cast<double>(g.degree(v));
      for (const auto& inc : g.incidences(v)) {
        std::vector<Vertex> q = path;
        const auto it = std::find(q.begin(), q.end(), inc.to);
        if (it != q.end()) q.erase(it + 1, q.end());
        else q.push_back(inc.to);
        if (inc.to == b) law[q] += step;
        else next[q] += step;
      }
    }
    live.swap(next);
    remaining = 0;
    for (const auto& [path, mass] : live) remaining += mass;
  }
  residual = remaining;
  return law;
}

/// P[S(t) = 0] on Z^d from the full distribution of S(t).
inline double return_probability(int d, int t) {
  std::map<std::vector<int>, double> dist{{std::vector<int>(d, 0), 1.0}};
  for (int s = 0; s < t; ++s) {
    std::map<std::vector<int>, double> next;
    for (const auto& [x, p] : dist) {
      for (int axis = 0; axis < d; ++axis) {
        for (const int sign : {-1, 1}) {
          std::vector<int> y = x;
          y[axis] += sign;
          next[y] += p / (2.0 * d);
        }
      }
    }
    dist.swap(next);
  }
  const auto it = dist.find(std::vector<int>(d, 0));
  return it == dist.end() ? 0.0 : it->second;
}

/// Connected components of an edge subset by repeated relaxation.
inline std::vector<Vertex> component_labels(std::size_t n,
                                            const std::vector<std::pair<Vertex, Vertex>>& edges) {
  std::vector<Vertex> label(n);
  std::iota(label.begin(), label.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [u, v] : edges) {
      const Vertex m = std::min(label[u], label[v]);
      if (label[u] != m || label[v] != m) {
        label[u] = label[v] = m;
        changed = true;
      }
    }
  }
  return label;
}

/// Random connected multigraph on n vertices: a random tree plus extra
/// edges (parallel edges allowed, no self-loops).
inline Graph random_connected_graph(std::mt19937_64& gen, std::size_t n, std::size_t extra) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex v = 1; v < n; ++v) {
    std::uniform_int_distribution<Vertex> pick(0, v - 1);
    edges.emplace_back(pick(gen), v);
  }
  std::uniform_int_distribution<Vertex> any(0, static_cast<Vertex>(n - 1));
  while (extra > 0) {
    const Vertex u = any(gen), v = any(gen);
    if (u == v) continue;
    edges.emplace_back(u, v);
    --extra;
  }
  return Graph(n, std::move(edges));
}

// Random test inputs.

// Edge boundary of a vertex set.
inline std::vector<EdgeId> edge_boundary(const Graph& g, const std::vector<std::uint8_t>& inside) {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto [u, v] = g.endpoints(e);
    if (inside[u] != inside[v]) out.push_back(e);
  }
  return out;
}

// Random sets containing a but not b, grown outward from a.
inline forestlab::CutSetFamily random_cut_family(const Graph& g, Vertex a, Vertex b, std::mt19937_64& gen) {
  forestlab::CutSetFamily family;
  std::vector<std::uint8_t> inside(g.vertex_count(), 0);
  inside[a] = 1;
  std::uniform_int_distribution<int> coin(0, 2);
  for (int k = 0; k < 6; ++k) {
    family.cuts.push_back(edge_boundary(g, inside));
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      const auto [u, v] = g.endpoints(e);
      if (coin(gen) != 0) continue;
      if (inside[u] && v != b) inside[v] = 1;
      if (inside[v] && u != b) inside[u] = 1;
    }
  }
  return family;
}

// Convex combination of unit flows along loop-erased random walks a -> b.
inline forestlab::UnitFlow random_unit_flow(const Graph& g, Vertex a, Vertex b, std::mt19937_64& gen) {
  forestlab::UnitFlow flow{std::vector<double>(g.edge_count(), 0)};
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::vector<double> w(3);
  for (auto& x : w) x = weight(gen);
  const double total = w[0] + w[1] + w[2];
  for (const double wi : w) {
    std::vector<Vertex> walk{a};
    while (walk.back() != b) {
      const auto inc = g.incidences(walk.back());
      std::uniform_int_distribution<std::size_t> pick(0, inc.size() - 1);
      walk.push_back(inc[pick(gen)].to);
    }
    const auto path = loop_erase(walk);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      for (const auto& inc : g.incidences(path[i])) {
        if (inc.to != path[i + 1]) continue;
        const double sign = g.endpoints(inc.edge).first == path[i] ? 1.0 : -1.0;
        flow.flow[inc.edge] += sign * wi / total;
        break;
      }
    }
  }
  return flow;
}

}  // namespace oracle
