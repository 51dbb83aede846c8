#include "forestlab/wilson.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace forestlab {

Vertex SpanningForest::root_of(Vertex v) const {
  if (!contains(v)) throw ContractViolation("root_of: vertex outside the forest");
  while (parent[v] != kNoVertex) v = parent[v];
  return v;
}

std::size_t SpanningForest::edge_count() const {
  return static_cast<std::size_t>(
      std::count_if(parent_edge.begin(), parent_edge.end(), [](EdgeId e) { return e != kNoEdge; }));
}

std::vector<EdgeId> SpanningForest::edges() const {
  std::vector<EdgeId> out;
  for (const EdgeId e : parent_edge) {
    if (e != kNoEdge) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Mask SpanningForest::edge_mask(std::size_t host_edge_count) const {
  Mask mask(host_edge_count, 0);
  for (const EdgeId e : parent_edge) {
    if (e != kNoEdge) mask.at(e) = 1;
  }
  return mask;
}

SpanningForest make_forest(std::vector<Vertex> parent, std::vector<EdgeId> parent_edge,
                           const Mask& present) {
  const std::size_t n = parent.size();
  if (parent_edge.size() != n || (!present.empty() && present.size() != n))
    throw ContractViolation("make_forest: array sizes differ");
  const auto in_forest = [&](Vertex v) { return present.empty() || present[v] != 0; };

  SpanningForest f;
  f.components.labels.assign(n, kNoVertex);
  std::vector<Vertex> root(n, kNoVertex);
  std::vector<std::uint8_t> state(n, 0);  // 0 new, 1 on the current chain, 2 done
  std::vector<Vertex> chain;
  for (Vertex v = 0; v < n; ++v) {
    if (!in_forest(v)) {
      parent[v] = kNoVertex;
      parent_edge[v] = kNoEdge;
      continue;
    }
    if ((parent[v] == kNoVertex) != (parent_edge[v] == kNoEdge))
      throw ContractViolation("make_forest: parent and parent edge disagree");
    if (parent[v] == kNoVertex) f.roots.push_back(v);
    if (state[v] == 2) continue;
    chain.clear();
    Vertex w = v;
    while (state[w] == 0 && parent[w] != kNoVertex) {
      state[w] = 1;
      chain.push_back(w);
      w = parent[w];
      if (w >= n || !in_forest(w)) throw ContractViolation("make_forest: parent outside the forest");
    }
    if (state[w] == 1) throw ContractViolation("make_forest: parent pointers contain a cycle");
    const Vertex r = state[w] == 2 ? root[w] : w;
    root[w] = r;
    state[w] = 2;
    for (const Vertex u : chain) {
      root[u] = r;
      state[u] = 2;
    }
  }
  std::vector<Vertex> label_of_root(n, kNoVertex);
  for (Vertex v = 0; v < n; ++v) {
    if (!in_forest(v)) continue;
    Vertex& label = label_of_root[root[v]];
    if (label == kNoVertex) {
      label = v;
      ++f.components.component_count;
    }
    f.components.labels[v] = label;
  }
  f.parent = std::move(parent);
  f.parent_edge = std::move(parent_edge);
  return f;
}

std::vector<Vertex> identity_order(std::size_t n) {
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});
  return order;
}

SpanningForest wsf_wired_box(const LatticeBox& box, RngStream& rng) {
  if (!box.wired()) throw ContractViolation("wsf_wired_box: box must have a wired boundary");
  WilsonSampler<LatticeBox> sampler(box);
  sampler.add_root(*box.wired_vertex());
  sampler.grow_all(rng);
  return sampler.forest(true);
}

SpanningForest wsf_wired_box(const LatticeBoxSpec& spec, RngStream& rng, Limits limits) {
  return wsf_wired_box(LatticeBox(spec, limits), rng);
}

TwoSidedWsfSample two_sided_wsf(const LatticeBox& box, const TwoSidedLerwOptions& options,
                                RngStream& rng) {
  if (!box.wired()) throw ContractViolation("two_sided_wsf: box must have a wired boundary");
  const int d = box.dimension();
  const TwoSidedLerw lerw = two_sided_lerw(d, options, rng);
  const SiteCodec codec(d);
  auto box_id = [&](std::int64_t i) -> Vertex {
    const auto coords = codec.decode(lerw.at(i));
    return box.contains(coords) ? box.id_of(coords) : kNoVertex;
  };
  std::int64_t lo = 0, hi = 0;
  while (lo > lerw.first_index() && box_id(lo - 1) != kNoVertex) --lo;
  while (hi < lerw.last_index() && box_id(hi + 1) != kNoVertex) ++hi;

  TwoSidedWsfSample out;
  out.attempts = lerw.attempts;
  out.clipped = lo > lerw.first_index() || hi < lerw.last_index();
  for (std::int64_t i = lerw.first_index(); i <= lerw.last_index() && !out.reentered; ++i) {
    if ((i < lo || i > hi) && box_id(i) != kNoVertex) out.reentered = true;
  }
  for (std::int64_t i = lo; i <= hi; ++i) out.trunk.push_back(box_id(i));
  out.trunk_origin_offset = static_cast<std::size_t>(-lo);

  WilsonSampler<LatticeBox> sampler(box);
  sampler.add_root(*box.wired_vertex());
  for (std::size_t i = 0; i + 1 < out.trunk.size(); ++i) {
    const EdgeId e = box.edge_between(out.trunk[i], out.trunk[i + 1]);
    if (e == kNoEdge) throw ContractViolation("two_sided_wsf: trunk is not a lattice path");
    sampler.attach(out.trunk[i], out.trunk[i + 1], e);
  }
  sampler.add_root(out.trunk.back());
  sampler.grow_all(rng);
  out.forest = sampler.forest(true);
  return out;
}

TwoSidedWsfSample two_sided_wsf_coupling(const LatticeBox& box, RngStream& rng,
                                         std::uint64_t attempt_cap) {
  if (!box.wired()) throw ContractViolation("two_sided_wsf_coupling: box must be wired");
  const Vertex wired = *box.wired_vertex();
  const Vertex o = box.origin();
  WilsonSampler<LatticeBox> sampler(box);
  Mask on_ray(box.vertex_count(), 0);
  std::vector<Vertex> ray;
  TwoSidedWsfSample out;
  while (out.attempts < attempt_cap) {
    ++out.attempts;
    for (const Vertex u : ray) on_ray[u] = 0;
    ray.clear();
    sampler.reset();
    sampler.add_root(wired);
    sampler.grow(o, rng);
    for (Vertex u = o; u != wired; u = sampler.parent(u)) {
      ray.push_back(u);
      on_ray[u] = 1;
    }
    const Incidence first = box.incidence(o, rng.uniform_index(box.degree(o)));
    const Vertex v = first.to;
    if (sampler.in_tree(v)) continue;  // the first step stays on the ray
    sampler.grow(v, rng);
    Vertex u = v;
    while (u != wired && !on_ray[u]) u = sampler.parent(u);
    if (u != wired) continue;  // v joined the tree of o

    sampler.grow_all(rng);
    SpanningForest f = sampler.forest(true);
    // Reverse v's path to its root, then hang v below o.
    std::vector<Vertex> up{v};
    while (f.parent[up.back()] != kNoVertex) up.push_back(f.parent[up.back()]);
    std::vector<Vertex> parent = std::move(f.parent);
    std::vector<EdgeId> parent_edge = std::move(f.parent_edge);
    for (std::size_t i = up.size() - 1; i > 0; --i) {
      parent[up[i]] = up[i - 1];
      parent_edge[up[i]] = parent_edge[up[i - 1]];
    }
    parent[v] = o;
    parent_edge[v] = first.edge;
    Mask present(box.vertex_count(), 1);
    present[wired] = 0;
    out.forest = make_forest(std::move(parent), std::move(parent_edge), present);
    out.origin_edge = first.edge;
    out.trunk.assign(up.rbegin(), up.rend());
    out.trunk_origin_offset = out.trunk.size();
    out.trunk.insert(out.trunk.end(), ray.begin(), ray.end());
    return out;
  }
  throw StatisticalFailure("two_sided_wsf_coupling: no accepted sample within " +
                               std::to_string(attempt_cap) + " attempts",
                           out.attempts);
}

BigInt spanning_tree_count(const Graph& g, std::size_t max_vertices) {
  const std::size_t n = g.vertex_count();
  if (n > max_vertices)
    throw ResourceError("spanning_tree_count: " + std::to_string(n) +
                        " vertices exceed the exact-determinant cap");
  if (n <= 1) return 1;
  const std::size_t m = n - 1;  // drop the last vertex
  std::vector<std::vector<BigInt>> a(m, std::vector<BigInt>(m, 0));
  for (const auto& [u, v] : g.edges()) {
    if (u < m) a[u][u] += 1;
    if (v < m) a[v][v] += 1;
    if (u < m && v < m) {
      a[u][v] -= 1;
      a[v][u] -= 1;
    }
  }
  BigInt previous = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    if (a[k][k] == 0) {
      std::size_t pivot = k + 1;
      while (pivot < m && a[pivot][k] == 0) ++pivot;
      if (pivot == m) return 0;
      std::swap(a[k], a[pivot]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < m; ++i) {
      for (std::size_t j = k + 1; j < m; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / previous;
      }
    }
    previous = a[k][k];
  }
  BigInt det = a[m - 1][m - 1] * sign;
  return det < 0 ? BigInt(0) : det;
}

namespace {

// Union-find without path compression so unions can be undone.
class RollbackDsu {
 public:
  explicit RollbackDsu(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    history_.push_back(b);
    return true;
  }
  void undo() {
    const std::uint32_t b = history_.back();
    history_.pop_back();
    size_[parent_[b]] -= size_[b];
    parent_[b] = b;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint32_t> history_;
};

struct TreeEnumerator {
  const Graph& g;
  std::vector<std::vector<EdgeId>>& out;
  RollbackDsu dsu;
  std::vector<EdgeId> chosen;
  std::size_t needed;

  // chosen plus every edge from index i on still spans the graph.
  bool can_complete(EdgeId i) const {
    DisjointSet scratch(g.vertex_count());
    for (const EdgeId e : chosen) scratch.unite(g.endpoints(e).first, g.endpoints(e).second);
    for (EdgeId e = i; e < g.edge_count(); ++e)
      scratch.unite(g.endpoints(e).first, g.endpoints(e).second);
    return scratch.set_count() == 1;
  }

  void run(EdgeId i) {
    if (chosen.size() == needed) {
      out.push_back(chosen);
      return;
    }
    if (i >= g.edge_count() || g.edge_count() - i < needed - chosen.size()) return;
    const auto [u, v] = g.endpoints(i);
    if (dsu.unite(u, v)) {
      chosen.push_back(i);
      run(i + 1);
      chosen.pop_back();
      dsu.undo();
    }
    if (can_complete(i + 1)) run(i + 1);
  }
};

}  // namespace

std::vector<std::vector<EdgeId>> enumerate_spanning_trees(const Graph& g, std::size_t max_edges) {
  if (g.edge_count() > max_edges)
    throw ResourceError("enumerate_spanning_trees: " + std::to_string(g.edge_count()) +
                        " edges exceed the cap of " + std::to_string(max_edges));
  std::vector<std::vector<EdgeId>> out;
  const std::size_t n = g.vertex_count();
  if (n == 0) return out;
  TreeEnumerator walker{g, out, RollbackDsu(n), {}, n - 1};
  if (walker.can_complete(0)) walker.run(0);
  return out;
}

void write_forest(std::ostream& out, const SpanningForest& f) {
  std::size_t entries = 0;
  for (Vertex v = 0; v < f.size(); ++v) entries += f.contains(v);
  out << f.size() << ' ' << entries << '\n';
  for (const Vertex r : f.roots) out << r << " -1 -1\n";
  for (Vertex v = 0; v < f.size(); ++v) {
    if (f.contains(v) && !f.is_root(v)) out << v << ' ' << f.parent[v] << ' ' << f.parent_edge[v] << '\n';
  }
}

SpanningForest read_forest(std::istream& in) {
  std::string line;
  std::size_t n = 0, entries = 0, read = 0;
  bool have_header = false;
  std::vector<Vertex> parent;
  std::vector<EdgeId> parent_edge;
  Mask present;
  std::size_t line_no = 0;
  while ((!have_header || read < entries) && std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    if (!have_header) {
      if (!(fields >> n >> entries) || entries > n)
        throw FormatError("forest dump: bad header on line " + std::to_string(line_no));
      parent.assign(n, kNoVertex);
      parent_edge.assign(n, kNoEdge);
      present.assign(n, 0);
      have_header = true;
      continue;
    }
    long long v = 0, p = 0, e = 0;
    if (!(fields >> v >> p >> e) || v < 0 || static_cast<std::size_t>(v) >= n ||
        p < -1 || (p >= 0 && static_cast<std::size_t>(p) >= n) || (p < 0) != (e < 0))
      throw FormatError("forest dump: bad entry on line " + std::to_string(line_no));
    if (present[v]) throw FormatError("forest dump: vertex repeated on line " + std::to_string(line_no));
    present[v] = 1;
    ++read;
    if (p >= 0) {
      parent[v] = static_cast<Vertex>(p);
      parent_edge[v] = static_cast<EdgeId>(e);
    }
  }
  if (!have_header) throw FormatError("forest dump: missing header");
  if (read < entries) throw FormatError("forest dump: truncated after line " + std::to_string(line_no));
  try {
    return make_forest(std::move(parent), std::move(parent_edge), present);
  } catch (const ContractViolation& err) {
    throw FormatError(std::string("forest dump: ") + err.what());
  }
}

}  // namespace forestlab
