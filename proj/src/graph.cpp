#include "forestlab/graph.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace forestlab {

Graph::Graph(std::size_t vertex_count, std::vector<std::pair<Vertex, Vertex>> edges,
             std::optional<Vertex> wired_vertex)
    : vertex_count_(vertex_count), edges_(std::move(edges)), wired_(wired_vertex) {
  if (edges_.size() >= kNoEdge) throw ResourceError("graph: too many edges for 32-bit edge ids");
  if (vertex_count_ >= kNoVertex) throw ResourceError("graph: too many vertices for 32-bit ids");
  if (wired_ && *wired_ >= vertex_count_)
    throw ContractViolation("graph: wired vertex " + std::to_string(*wired_) + " out of range");
  offsets_.assign(vertex_count_ + 1, 0);
  for (const auto& [u, v] : edges_) {
    if (u >= vertex_count_ || v >= vertex_count_)
      throw ContractViolation("graph: edge endpoint out of range");
    if (u == v) throw ContractViolation("graph: self-loop at vertex " + std::to_string(u));
    ++offsets_[u + 1];
    ++offsets_[v + 1];
  }
  for (std::size_t v = 0; v < vertex_count_; ++v) offsets_[v + 1] += offsets_[v];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const auto [u, v] = edges_[e];
    adjacency_[fill[u]++] = {v, e};
    adjacency_[fill[v]++] = {u, e};
  }
}

std::uint64_t lattice_box_size(int dimension, int radius, Limits limits) {
  if (dimension < 1) throw ContractViolation("lattice box: dimension must be >= 1");
  if (radius < 1) throw ContractViolation("lattice box: radius must be >= 1");
  const std::uint64_t side = 2 * static_cast<std::uint64_t>(radius) + 1;
  unsigned __int128 count = 1;
  bool huge = false;
  for (int i = 0; i < dimension && !huge; ++i) {
    count *= side;
    huge = count > (static_cast<unsigned __int128>(1) << 96);
  }
  if (huge || count > limits.vertex_budget) {
    std::ostringstream msg;
    msg << "lattice box: (2*" << radius << "+1)^" << dimension << " = ";
    if (huge || count > std::numeric_limits<std::uint64_t>::max())
      msg << std::pow(static_cast<long double>(side), dimension);
    else
      msg << static_cast<std::uint64_t>(count);
    msg << " vertices exceed the vertex budget of " << limits.vertex_budget;
    throw ResourceError(msg.str());
  }
  return static_cast<std::uint64_t>(count);
}

LatticeBox::LatticeBox(LatticeBoxSpec spec, Limits limits) : spec_(spec) {
  box_vertices_ = lattice_box_size(spec.dimension, spec.radius, limits);
  side_ = 2 * spec.radius + 1;
  face_size_ = box_vertices_ / side_;
  stride_.resize(spec.dimension + 1);
  stride_[0] = 1;
  for (int i = 0; i < spec.dimension; ++i) stride_[i + 1] = stride_[i] * side_;
  const std::size_t d = spec.dimension;
  edge_count_ = wired() ? box_vertices_ * d + d * face_size_ : d * face_size_ * (side_ - 1);
  if (edge_count_ >= kNoEdge) throw ResourceError("lattice box: edge count exceeds 32-bit ids");
  std::vector<int> zero(spec.dimension, 0);
  origin_ = id_of(zero);
}

std::size_t LatticeBox::face_index(Vertex v, int axis) const {
  const std::size_t low = v % stride_[axis];
  const std::size_t high = v / stride_[axis + 1];
  return low + high * stride_[axis];
}

Vertex LatticeBox::face_vertex(std::size_t index, int axis, int coordinate) const {
  const std::size_t low = index % stride_[axis];
  const std::size_t high = index / stride_[axis];
  return static_cast<Vertex>(low + static_cast<std::size_t>(coordinate + spec_.radius) * stride_[axis] +
                             high * stride_[axis + 1]);
}

std::size_t LatticeBox::degree(Vertex v) const {
  const int d = spec_.dimension;
  if (wired()) return v == box_vertices_ ? 2 * d * face_size_ : 2 * static_cast<std::size_t>(d);
  std::size_t deg = 0;
  for (int axis = 0; axis < d; ++axis) {
    const int c = coordinate(v, axis);
    deg += (c < spec_.radius) + (c > -spec_.radius);
  }
  return deg;
}

Incidence LatticeBox::incidence(Vertex v, std::size_t k) const {
  const std::size_t d = spec_.dimension;
  const int r = spec_.radius;
  if (wired()) {
    const auto wired_id = static_cast<Vertex>(box_vertices_);
    if (v == wired_id) {
      const std::size_t face = k / face_size_;
      const std::size_t index = k % face_size_;
      const int axis = static_cast<int>(face / 2);
      if (face % 2 == 0) {
        const Vertex u = face_vertex(index, axis, r);
        return {u, static_cast<EdgeId>(u * d + axis)};
      }
      const Vertex u = face_vertex(index, axis, -r);
      return {u, static_cast<EdgeId>(box_vertices_ * d + axis * face_size_ + index)};
    }
    const int axis = static_cast<int>(k >> 1);
    const int c = coordinate(v, axis);
    if ((k & 1) == 0) {
      const auto e = static_cast<EdgeId>(static_cast<std::size_t>(v) * d + axis);
      return c < r ? Incidence{static_cast<Vertex>(v + stride_[axis]), e} : Incidence{wired_id, e};
    }
    if (c > -r) {
      const auto u = static_cast<Vertex>(v - stride_[axis]);
      return {u, static_cast<EdgeId>(static_cast<std::size_t>(u) * d + axis)};
    }
    return {wired_id, static_cast<EdgeId>(box_vertices_ * d + axis * face_size_ + face_index(v, axis))};
  }
  // Free box: k-th existing direction in the order (+0, -0, +1, -1, ...).
  const std::size_t per_axis = face_size_ * (side_ - 1);
  for (std::size_t axis = 0; axis < d; ++axis) {
    const int c = coordinate(v, static_cast<int>(axis));
    for (int dir = 0; dir < 2; ++dir) {
      const bool exists = dir == 0 ? c < r : c > -r;
      if (!exists) continue;
      if (k-- != 0) continue;
      const Vertex lower = dir == 0 ? v : static_cast<Vertex>(v - stride_[axis]);
      const Vertex upper = dir == 0 ? static_cast<Vertex>(v + stride_[axis]) : v;
      const std::size_t low = lower % stride_[axis];
      const std::size_t digit = (lower / stride_[axis]) % side_;
      const std::size_t high = lower / stride_[axis + 1];
      const std::size_t index = low + digit * stride_[axis] + high * stride_[axis] * (side_ - 1);
      return {dir == 0 ? upper : lower, static_cast<EdgeId>(axis * per_axis + index)};
    }
  }
  throw ContractViolation("lattice box: incidence index out of range");
}

std::pair<Vertex, Vertex> LatticeBox::endpoints(EdgeId e) const {
  const std::size_t d = spec_.dimension;
  const int r = spec_.radius;
  if (wired()) {
    const auto wired_id = static_cast<Vertex>(box_vertices_);
    if (e < box_vertices_ * d) {
      const auto u = static_cast<Vertex>(e / d);
      const int axis = static_cast<int>(e % d);
      if (coordinate(u, axis) < r) return {u, static_cast<Vertex>(u + stride_[axis])};
      return {u, wired_id};
    }
    const std::size_t rest = e - box_vertices_ * d;
    const int axis = static_cast<int>(rest / face_size_);
    return {face_vertex(rest % face_size_, axis, -r), wired_id};
  }
  const std::size_t per_axis = face_size_ * (side_ - 1);
  const std::size_t axis = e / per_axis;
  const std::size_t index = e % per_axis;
  const std::size_t low = index % stride_[axis];
  const std::size_t digit = (index / stride_[axis]) % (side_ - 1);
  const std::size_t high = index / (stride_[axis] * (side_ - 1));
  const auto u = static_cast<Vertex>(low + digit * stride_[axis] + high * stride_[axis + 1]);
  return {u, static_cast<Vertex>(u + stride_[axis])};
}

bool LatticeBox::contains(std::span<const int> coords) const {
  if (static_cast<int>(coords.size()) != spec_.dimension) return false;
  for (const int c : coords)
    if (c < -spec_.radius || c > spec_.radius) return false;
  return true;
}

Vertex LatticeBox::id_of(std::span<const int> coords) const {
  if (!contains(coords)) throw DomainError("lattice box: point outside the box");
  std::size_t id = 0;
  for (int axis = 0; axis < spec_.dimension; ++axis)
    id += static_cast<std::size_t>(coords[axis] + spec_.radius) * stride_[axis];
  return static_cast<Vertex>(id);
}

std::vector<int> LatticeBox::coords_of(Vertex v) const {
  if (v >= box_vertices_) throw DomainError("lattice box: vertex has no coordinates");
  std::vector<int> coords(spec_.dimension);
  for (int axis = 0; axis < spec_.dimension; ++axis) coords[axis] = coordinate(v, axis);
  return coords;
}

EdgeId LatticeBox::edge_between(Vertex u, Vertex v) const {
  if (wired() && u == box_vertices_) std::swap(u, v);
  EdgeId best = kNoEdge;
  for (std::size_t k = 0; k < degree(u); ++k) {
    const Incidence inc = incidence(u, k);
    if (inc.to == v && inc.edge < best) best = inc.edge;
  }
  return best;
}

int LatticeBox::l1_norm(Vertex v) const {
  int norm = 0;
  for (int axis = 0; axis < spec_.dimension; ++axis) norm += std::abs(coordinate(v, axis));
  return norm;
}

bool LatticeBox::on_boundary(Vertex v) const {
  if (v >= box_vertices_) return false;
  for (int axis = 0; axis < spec_.dimension; ++axis)
    if (std::abs(coordinate(v, axis)) == spec_.radius) return true;
  return false;
}

Graph LatticeBox::to_graph() const {
  std::vector<std::pair<Vertex, Vertex>> edges(edge_count_);
  for (EdgeId e = 0; e < edge_count_; ++e) edges[e] = endpoints(e);
  return Graph(vertex_count(), std::move(edges), wired_vertex());
}

Graph build_lattice_box(const LatticeBoxSpec& spec, Limits limits) {
  return LatticeBox(spec, limits).to_graph();
}

CounterexampleGraph counterexample_graph(int radius, Limits limits) {
  const std::uint64_t box = lattice_box_size(5, radius, limits);
  if (2 * (box + 1) > limits.vertex_budget)
    throw ResourceError("counterexample graph: " + std::to_string(2 * (box + 1)) +
                        " vertices exceed the vertex budget");
  const LatticeBox copy({5, radius, Boundary::Wired}, limits);
  CounterexampleGraph out;
  out.copy_size = copy.vertex_count();
  const auto offset = static_cast<Vertex>(out.copy_size);
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(2 * copy.edge_count() + 1);
  for (int c = 0; c < 2; ++c)
    for (EdgeId e = 0; e < copy.edge_count(); ++e) {
      const auto [u, v] = copy.endpoints(e);
      edges.emplace_back(u + c * offset, v + c * offset);
    }
  out.origins = {copy.origin(), copy.origin() + offset};
  out.wired = {*copy.wired_vertex(), *copy.wired_vertex() + offset};
  out.bridge = static_cast<EdgeId>(edges.size());
  edges.emplace_back(out.origins[0], out.origins[1]);
  out.graph = Graph(2 * out.copy_size, std::move(edges));
  return out;
}

std::vector<std::vector<Vertex>> ComponentMap::groups() const {
  std::vector<std::vector<Vertex>> out;
  std::vector<std::size_t> slot(labels.size(), 0);
  for (Vertex v = 0; v < labels.size(); ++v) {
    if (labels[v] == kNoVertex) continue;
    if (labels[v] == v) {
      slot[v] = out.size();
      out.emplace_back();
    }
    out[slot[labels[v]]].push_back(v);
  }
  return out;
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos != std::string::npos && line[pos] != '#') return true;
    }
    return false;
  };
  if (!next_line()) throw FormatError("edge list: missing header line");
  std::istringstream header(line);
  long long n = -1, m = -1, wired = -1;
  if (!(header >> n >> m) || n < 0 || m < 0)
    throw FormatError("edge list: header must read 'n m [wired_id]'");
  std::optional<Vertex> wired_vertex;
  if (header >> wired) {
    if (wired < 0 || wired >= n) throw FormatError("edge list: wired id out of range");
    wired_vertex = static_cast<Vertex>(wired);
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    if (!next_line()) throw FormatError("edge list: expected " + std::to_string(m) + " edges");
    std::istringstream row(line);
    long long u = -1, v = -1;
    if (!(row >> u >> v) || u < 0 || v < 0 || u >= n || v >= n)
      throw FormatError("edge list: bad edge line '" + line + "'");
    if (u == v) throw FormatError("edge list: self-loop '" + line + "'");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  return Graph(static_cast<std::size_t>(n), std::move(edges), wired_vertex);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.vertex_count() << ' ' << g.edge_count();
  if (g.wired_vertex()) out << ' ' << *g.wired_vertex();
  out << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

}  // namespace forestlab
