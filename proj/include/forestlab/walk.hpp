#pragma once

#include <absl/container/flat_hash_map.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "forestlab/errors.hpp"
#include "forestlab/graph.hpp"
#include "forestlab/rng.hpp"

namespace forestlab {

/// Vertex sequence with consecutive vertices adjacent; length = size - 1.
using Path = std::vector<Vertex>;

inline std::size_t path_length(const Path& p) { return p.empty() ? 0 : p.size() - 1; }

struct HitSet {
  std::vector<Vertex> targets;
};
struct FixedSteps {
  std::uint64_t steps = 0;
};
struct HitWired {};
using StopRule = std::variant<HitSet, FixedSteps, HitWired>;

struct WalkLimits {
  std::uint64_t step_cap = 100'000'000;
};

/// Simple random walk; each step picks an incident edge uniformly, so
/// parallel edges count with multiplicity.
template <WalkableGraph G>
Path run_srw(const G& g, Vertex start, const StopRule& stop, RngStream& rng, WalkLimits limits = {}) {
  if (start >= g.vertex_count()) throw ContractViolation("run_srw: start vertex out of range");
  Path path{start};
  auto step = [&](Vertex v) {
    const std::size_t deg = g.degree(v);
    if (deg == 0) throw DomainError("run_srw: walk reached an isolated vertex");
    return g.incidence(v, rng.uniform_index(deg)).to;
  };
  if (const auto* fixed = std::get_if<FixedSteps>(&stop)) {
    if (fixed->steps > limits.step_cap)
      throw ResourceError("run_srw: " + std::to_string(fixed->steps) + " steps exceed the step cap");
    path.reserve(fixed->steps + 1);
    for (std::uint64_t i = 0; i < fixed->steps; ++i) path.push_back(step(path.back()));
    return path;
  }
  Mask target(g.vertex_count(), 0);
  if (const auto* hit = std::get_if<HitSet>(&stop)) {
    for (const Vertex v : hit->targets) target.at(v) = 1;
  } else {
    const auto wired = g.wired_vertex();
    if (!wired) throw DomainError("run_srw: HitWired on a graph without a wired vertex");
    target[*wired] = 1;
  }
  std::uint64_t steps = 0;
  while (!target[path.back()]) {
    if (++steps > limits.step_cap)
      throw StepBudgetExceeded("run_srw: target not reached within " +
                               std::to_string(limits.step_cap) + " steps");
    path.push_back(step(path.back()));
  }
  return path;
}

/// Chronological loop erasure: u_0 = v_0 and u_{j+1} = v_{k+1} where k is
/// the last index with v_k = u_j.
template <class T, class Hash = absl::Hash<T>>
std::vector<T> loop_erase(std::span<const T> path) {
  std::vector<T> out;
  if (path.empty()) return out;
  absl::flat_hash_map<T, std::size_t, Hash> last;
  last.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) last[path[i]] = i;
  std::size_t k = last[path[0]];
  out.push_back(path[0]);
  while (k + 1 < path.size()) {
    const T next = path[k + 1];
    out.push_back(next);
    k = last[next];
  }
  return out;
}

inline Path loop_erase(const Path& path) { return loop_erase<Vertex>(std::span<const Vertex>(path)); }

/// Online loop erasure: push sites one at a time; the stack is always the
/// loop erasure of the prefix seen so far.
template <class T, class Hash = absl::Hash<T>>
class LoopEraser {
 public:
  void clear() {
    stack_.clear();
    position_.clear();
  }
  void push(const T& site) {
    if (auto it = position_.find(site); it != position_.end()) {
      const std::size_t keep = it->second + 1;
      for (std::size_t i = keep; i < stack_.size(); ++i) position_.erase(stack_[i]);
      stack_.resize(keep);
      return;
    }
    position_.emplace(site, stack_.size());
    stack_.push_back(site);
  }
  const std::vector<T>& path() const { return stack_; }
  std::size_t length() const { return stack_.empty() ? 0 : stack_.size() - 1; }

 private:
  std::vector<T> stack_;
  absl::flat_hash_map<T, std::size_t, Hash> position_;
};

/// Indices t with {v_i : i < t} and {v_i : i > t} disjoint, relative to the
/// given finite window (indices 0 and size-1 always qualify).
template <class T, class Hash = absl::Hash<T>>
std::vector<std::size_t> cut_times(std::span<const T> path) {
  const std::size_t n = path.size();
  std::vector<std::size_t> out;
  if (n == 0) return out;
  absl::flat_hash_map<T, std::pair<std::size_t, std::size_t>, Hash> span;
  span.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = span.try_emplace(path[i], i, i);
    if (!inserted) it->second.second = i;
  }
  // A site seen at first < t < last blocks t.
  std::vector<long> cover(n + 1, 0);
  for (const auto& [site, fl] : span) {
    if (fl.second - fl.first < 2) continue;
    ++cover[fl.first + 1];
    --cover[fl.second];
  }
  long running = 0;
  for (std::size_t t = 0; t < n; ++t) {
    running += cover[t];
    if (running == 0) out.push_back(t);
  }
  return out;
}

inline std::vector<std::size_t> cut_times(const Path& path) {
  return cut_times<Vertex>(std::span<const Vertex>(path));
}

/// Loop rooted at its first vertex with either a marked time in [0, |loop|]
/// or a marked step in [0, |loop| - 1].
struct MarkedLoop {
  struct Time {
    std::size_t index;
  };
  struct Step {
    std::size_t index;
  };

  MarkedLoop(Path loop, std::variant<Time, Step> mark);

  const Path& loop() const { return loop_; }
  const std::variant<Time, Step>& mark() const { return mark_; }
  std::size_t length() const { return path_length(loop_); }
  /// Loop-measure weight (2d)^{-|loop|} on Z^d.
  double weight(int dimension) const {
    return std::pow(2.0 * dimension, -static_cast<double>(length()));
  }

 private:
  Path loop_;
  std::variant<Time, Step> mark_;
};

/// Stationary law of an irreducible finite chain.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition);
bool is_irreducible(const Eigen::MatrixXd& transition);

struct KacResult {
  double mean_return_time = 0;
  double inverse_event_probability = 0;
  double half_width = 0;
  double event_probability = 0;
  std::uint64_t samples = 0;
};

/// Starts the chain from its stationary law conditioned on the event and
/// measures the first return time to the event.
KacResult kac_check(const Eigen::MatrixXd& transition, std::span<const std::size_t> event,
                    std::uint64_t samples, RngStream& rng, double confidence = 0.999);

}  // namespace forestlab
