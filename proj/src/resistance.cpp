#include "forestlab/resistance.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <string>
#include <variant>

namespace forestlab {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

std::vector<Vertex> component_roots(const Graph& g) {
  DisjointSet dsu(g.vertex_count());
  for (const auto& [u, v] : g.edges()) dsu.unite(u, v);
  std::vector<Vertex> root(g.vertex_count());
  for (Vertex v = 0; v < g.vertex_count(); ++v) root[v] = dsu.find(v);
  return root;
}

// Laplacian restricted to the unknowns (index >= 0); off-unknown neighbours
// are dropped, i.e. treated as grounded.
SparseMatrix reduced_laplacian(const Graph& g, const std::vector<Eigen::Index>& index,
                               Eigen::Index size) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (index[v] < 0) continue;
    triplets.emplace_back(index[v], index[v], static_cast<double>(g.degree(v)));
    for (const Incidence inc : g.incidences(v)) {
      if (index[inc.to] >= 0) triplets.emplace_back(index[v], index[inc.to], -1.0);
    }
  }
  SparseMatrix l(size, size);
  l.setFromTriplets(triplets.begin(), triplets.end());
  return l;
}

Eigen::VectorXd solve_spd(const SparseMatrix& l, const Eigen::VectorXd& rhs,
                          const ResistanceOptions& options) {
  if (static_cast<std::size_t>(l.rows()) < options.dense_limit) {
    const Eigen::MatrixXd dense(l);
    return dense.ldlt().solve(rhs);
  }
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg;
  cg.setTolerance(options.tolerance);
  cg.setMaxIterations(std::max<Eigen::Index>(1000, 20 * l.rows()));
  cg.compute(l);
  if (cg.info() != Eigen::Success) throw Error("resistance: preconditioner setup failed");
  Eigen::VectorXd x = cg.solve(rhs);
  if (cg.info() != Eigen::Success)
    throw ResourceError("resistance: conjugate gradient did not reach the tolerance");
  return x;
}

}  // namespace

PotentialField solve_potential(const Graph& g, std::span<const Vertex> a,
                               std::span<const Vertex> b, const ResistanceOptions& options) {
  const std::size_t n = g.vertex_count();
  if (a.empty() || b.empty()) throw ContractViolation("solve_potential: A and B must be nonempty");
  std::vector<std::uint8_t> role(n, 0);
  for (const Vertex v : a) {
    if (v >= n) throw ContractViolation("solve_potential: vertex out of range");
    role[v] = 1;
  }
  for (const Vertex v : b) {
    if (v >= n) throw ContractViolation("solve_potential: vertex out of range");
    if (role[v] == 1) throw DomainError("solve_potential: A and B overlap at vertex " + std::to_string(v));
    role[v] = 2;
  }
  const auto root = component_roots(g);
  std::vector<std::uint8_t> sides(n, 0);  // bit 1: meets A, bit 2: meets B
  for (Vertex v = 0; v < n; ++v) sides[root[v]] |= role[v];

  PotentialField field;
  field.boundary_a.assign(a.begin(), a.end());
  field.boundary_b.assign(b.begin(), b.end());
  field.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  std::vector<Eigen::Index> index(n, -1);
  Eigen::Index unknowns = 0;
  for (Vertex v = 0; v < n; ++v) {
    const std::uint8_t s = sides[root[v]];
    if (s == 3) field.connected = true;
    if (role[v] == 1 || (role[v] == 0 && s == 1)) field.values(v) = 1.0;
    if (role[v] == 0 && s == 3) index[v] = unknowns++;
  }
  if (unknowns > 0) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
    for (Vertex v = 0; v < n; ++v) {
      if (index[v] < 0) continue;
      for (const Incidence inc : g.incidences(v)) {
        if (role[inc.to] == 1) rhs(index[v]) += 1.0;
      }
    }
    const Eigen::VectorXd x = solve_spd(reduced_laplacian(g, index, unknowns), rhs, options);
    for (Vertex v = 0; v < n; ++v) {
      if (index[v] >= 0) field.values(v) = x(index[v]);
    }
  }
  field.energy = energy(g, field.values);
  return field;
}

double effective_resistance(const Graph& g, std::span<const Vertex> a, std::span<const Vertex> b,
                            const ResistanceOptions& options) {
  return solve_potential(g, a, b, options).resistance();
}

double effective_resistance(const Graph& g, Vertex a, Vertex b, const ResistanceOptions& options) {
  const Vertex sa[] = {a};
  const Vertex sb[] = {b};
  return effective_resistance(g, sa, sb, options);
}

struct GroundedLaplacian::Factor {
  std::variant<Eigen::LDLT<Eigen::MatrixXd>, Eigen::SimplicialLDLT<SparseMatrix>> solver;
  Eigen::Index size = 0;
};

GroundedLaplacian::GroundedLaplacian(const Graph& g, Vertex ground, const ResistanceOptions& options)
    : ground_(ground), index_(g.vertex_count(), -1), factor_(std::make_unique<Factor>()) {
  if (ground >= g.vertex_count()) throw ContractViolation("GroundedLaplacian: ground out of range");
  const auto root = component_roots(g);
  Eigen::Index size = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (v != ground && root[v] == root[ground]) index_[v] = size++;
  }
  factor_->size = size;
  const SparseMatrix l = reduced_laplacian(g, index_, size);
  if (static_cast<std::size_t>(size) < options.dense_limit) {
    factor_->solver.emplace<0>(Eigen::MatrixXd(l));
  } else {
    auto& sparse = factor_->solver.emplace<1>();
    sparse.compute(l);
    if (sparse.info() != Eigen::Success) throw Error("GroundedLaplacian: factorization failed");
  }
}

GroundedLaplacian::~GroundedLaplacian() = default;
GroundedLaplacian::GroundedLaplacian(GroundedLaplacian&&) noexcept = default;
GroundedLaplacian& GroundedLaplacian::operator=(GroundedLaplacian&&) noexcept = default;

double GroundedLaplacian::resistance_to(Vertex w) const {
  if (w == ground_) return 0.0;
  if (w >= index_.size()) throw ContractViolation("GroundedLaplacian: vertex out of range");
  if (index_[w] < 0) return kInfiniteResistance;
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(factor_->size);
  unit(index_[w]) = 1.0;
  const Eigen::VectorXd x =
      std::visit([&](const auto& solver) -> Eigen::VectorXd { return solver.solve(unit); },
                 factor_->solver);
  return x(index_[w]);
}

std::vector<double> wired_effective_resistance(int dimension, std::span<const int> radii,
                                               std::span<const int> x, std::span<const int> y,
                                               const ResistanceOptions& options) {
  std::vector<double> out;
  for (const int r : radii) {
    const LatticeBox box({dimension, r, Boundary::Wired});
    if (!box.contains(x) || !box.contains(y))
      throw DomainError("wired_effective_resistance: point outside the box of radius " +
                        std::to_string(r));
    out.push_back(effective_resistance(box.to_graph(), box.id_of(x), box.id_of(y), options));
  }
  return out;
}

std::vector<std::uint32_t> CutSetFamily::multiplicity(std::size_t edge_count) const {
  std::vector<std::uint32_t> j(edge_count, 0);
  for (const auto& cut : cuts) {
    for (const EdgeId e : cut) ++j.at(e);
  }
  return j;
}

void CutSetFamily::validate(const Graph& g, std::span<const Vertex> a,
                            std::span<const Vertex> b) const {
  Mask removed(g.edge_count(), 0);
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    for (const EdgeId e : cuts[k]) {
      if (e >= g.edge_count()) throw DomainError("cut set " + std::to_string(k + 1) + " names an unknown edge");
      removed[e] = 1;
    }
    DisjointSet dsu(g.vertex_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      if (!removed[e]) dsu.unite(g.endpoints(e).first, g.endpoints(e).second);
    }
    std::vector<std::uint8_t> a_root(g.vertex_count(), 0);
    for (const Vertex v : a) a_root[dsu.find(v)] = 1;
    for (const Vertex v : b) {
      if (a_root[dsu.find(v)])
        throw DomainError("cut set " + std::to_string(k + 1) + " does not separate A from B");
    }
    for (const EdgeId e : cuts[k]) removed[e] = 0;
  }
}

double nash_williams_lower_bound(const Graph& g, std::span<const Vertex> a,
                                 std::span<const Vertex> b, const CutSetFamily& family,
                                 double conductance) {
  family.validate(g, a, b);
  const auto j = family.multiplicity(g.edge_count());
  double bound = 0;
  for (const auto& cut : family.cuts) {
    double weight = 0;
    for (const EdgeId e : cut) weight += j[e] * conductance;
    bound += weight > 0 ? 1.0 / weight : kInfiniteResistance;
  }
  return bound;
}

double unit_flow_violation(const Graph& g, std::span<const Vertex> a, std::span<const Vertex> b,
                           const UnitFlow& flow) {
  if (flow.flow.size() != g.edge_count()) throw ContractViolation("unit flow: size mismatch");
  std::vector<double> net(g.vertex_count(), 0.0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto [u, v] = g.endpoints(e);
    net[u] += flow.flow[e];
    net[v] -= flow.flow[e];
  }
  std::vector<std::uint8_t> role(g.vertex_count(), 0);
  double out_a = 0, out_b = 0;
  for (const Vertex v : a) role[v] = 1;
  for (const Vertex v : b) role[v] = 2;
  double worst = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (role[v] == 1) out_a += net[v];
    else if (role[v] == 2) out_b += net[v];
    else worst = std::max(worst, std::abs(net[v]));
  }
  return std::max({worst, std::abs(out_a - 1.0), std::abs(out_b + 1.0)});
}

double thomson_upper_bound(const Graph& g, std::span<const Vertex> a, std::span<const Vertex> b,
                           const UnitFlow& flow, double tolerance) {
  const double violation = unit_flow_violation(g, a, b, flow);
  if (violation > tolerance)
    throw DomainError("thomson_upper_bound: not a unit flow (max violation " +
                      std::to_string(violation) + ")");
  double sum = 0;
  for (const double x : flow.flow) sum += x * x;
  return sum;
}

UnitFlow current_flow(const Graph& g, const PotentialField& potential) {
  if (!potential.connected) throw DomainError("current_flow: A and B are not connected");
  UnitFlow out;
  out.flow.resize(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto [u, v] = g.endpoints(e);
    out.flow[e] = (potential.values(u) - potential.values(v)) / potential.energy;
  }
  return out;
}

double local_modification_gap(const Graph& h, const Graph& h_prime,
                              std::span<const std::pair<Vertex, Vertex>> probes,
                              const ResistanceOptions& options) {
  double gap = probes.empty() ? 0.0 : -kInfiniteResistance;
  for (const auto& [u, v] : probes) {
    if (u >= h.vertex_count() || v >= h.vertex_count() || u >= h_prime.vertex_count() ||
        v >= h_prime.vertex_count())
      throw DomainError("local_modification_gap: probe outside one of the graphs");
    gap = std::max(gap, effective_resistance(h, u, v, options) -
                            effective_resistance(h_prime, u, v, options));
  }
  return gap;
}

}  // namespace forestlab
