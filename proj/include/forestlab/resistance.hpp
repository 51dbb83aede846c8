#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "forestlab/errors.hpp"
#include "forestlab/graph.hpp"

namespace forestlab {

inline constexpr double kInfiniteResistance = std::numeric_limits<double>::infinity();

struct ResistanceOptions {
  std::size_t dense_limit = 2000;  // free vertices below this use dense LDLT
  double tolerance = 1e-10;        // CG relative residual
};

/// Dirichlet energy: sum over edges of (f(x) - f(y))^2, parallel edges
/// counted separately.
template <WalkableGraph G, class Derived>
double energy(const G& g, const Eigen::MatrixBase<Derived>& f) {
  if (static_cast<std::size_t>(f.size()) != g.vertex_count())
    throw ContractViolation("energy: potential size does not match the graph");
  double sum = 0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto [u, v] = g.endpoints(e);
    const double gap = f(u) - f(v);
    sum += gap * gap;
  }
  return sum;
}

/// Harmonic potential with f = 1 on A and f = 0 on B. Vertices in
/// components without boundary keep f = 0; components touching only one
/// side are constant on that side's value.
struct PotentialField {
  Eigen::VectorXd values;
  std::vector<Vertex> boundary_a;
  std::vector<Vertex> boundary_b;
  double energy = 0;
  bool connected = false;  // some component meets both A and B
  double resistance() const { return connected ? 1.0 / energy : kInfiniteResistance; }
};

PotentialField solve_potential(const Graph& g, std::span<const Vertex> a,
                               std::span<const Vertex> b, const ResistanceOptions& options = {});

/// R_eff(A, B); +infinity when no component meets both sets.
double effective_resistance(const Graph& g, std::span<const Vertex> a, std::span<const Vertex> b,
                            const ResistanceOptions& options = {});
double effective_resistance(const Graph& g, Vertex a, Vertex b,
                            const ResistanceOptions& options = {});

/// Factors the Laplacian grounded at one vertex once; R(ground, w) for any w
/// in the ground's component is then a single back-substitution.
class GroundedLaplacian {
 public:
  GroundedLaplacian(const Graph& g, Vertex ground, const ResistanceOptions& options = {});
  ~GroundedLaplacian();
  GroundedLaplacian(GroundedLaplacian&&) noexcept;
  GroundedLaplacian& operator=(GroundedLaplacian&&) noexcept;

  Vertex ground() const noexcept { return ground_; }
  double resistance_to(Vertex w) const;

 private:
  struct Factor;
  Vertex ground_;
  std::vector<Eigen::Index> index_;  // vertex -> row, -1 outside the component
  std::unique_ptr<Factor> factor_;
};

/// Effective resistance between x and y in wired boxes of each radius.
std::vector<double> wired_effective_resistance(int dimension, std::span<const int> radii,
                                               std::span<const int> x, std::span<const int> y,
                                               const ResistanceOptions& options = {});

/// Ordered edge sets C_1..C_n; j(e) counts the sets holding e.
struct CutSetFamily {
  std::vector<std::vector<EdgeId>> cuts;

  std::vector<std::uint32_t> multiplicity(std::size_t edge_count) const;
  /// DomainError naming the first C_k that fails to separate A from B.
  void validate(const Graph& g, std::span<const Vertex> a, std::span<const Vertex> b) const;
};

/// sum_k (sum_{e in C_k} j(e) c(e))^(-1) with unit conductances.
double nash_williams_lower_bound(const Graph& g, std::span<const Vertex> a,
                                 std::span<const Vertex> b, const CutSetFamily& family,
                                 double conductance = 1.0);

/// Signed flow per edge, positive from endpoints(e).first to .second.
struct UnitFlow {
  std::vector<double> flow;
};

/// Largest deviation from: net outflow 0 off A and B, +1 out of A, -1 out of B.
double unit_flow_violation(const Graph& g, std::span<const Vertex> a, std::span<const Vertex> b,
                           const UnitFlow& flow);

/// Sum of squared edge flows; DomainError if the flow is not a unit flow
/// within tolerance.
double thomson_upper_bound(const Graph& g, std::span<const Vertex> a, std::span<const Vertex> b,
                           const UnitFlow& flow, double tolerance = 1e-9);

/// The unit current flow of a solved potential.
UnitFlow current_flow(const Graph& g, const PotentialField& potential);

/// max over probes of R^H(u, v) - R^H'(u, v); both graphs share vertex ids.
double local_modification_gap(const Graph& h, const Graph& h_prime,
                              std::span<const std::pair<Vertex, Vertex>> probes,
                              const ResistanceOptions& options = {});

}  // namespace forestlab
