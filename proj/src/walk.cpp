#include "forestlab/walk.hpp"

#include <algorithm>
#include <vector>

#include "forestlab/stats.hpp"

namespace forestlab {

MarkedLoop::MarkedLoop(Path loop, std::variant<Time, Step> mark)
    : loop_(std::move(loop)), mark_(mark) {
  if (loop_.empty() || loop_.front() != loop_.back())
    throw ContractViolation("MarkedLoop: first and last vertex must coincide");
  const std::size_t len = length();
  if (const auto* t = std::get_if<Time>(&mark_); t && t->index > len)
    throw ContractViolation("MarkedLoop: marked time out of range");
  if (const auto* s = std::get_if<Step>(&mark_); s && (len == 0 || s->index >= len))
    throw ContractViolation("MarkedLoop: marked step out of range");
}

namespace {

void check_stochastic(const Eigen::MatrixXd& p) {
  if (p.rows() != p.cols() || p.rows() == 0)
    throw ContractViolation("transition matrix must be square and nonempty");
  if ((p.array() < 0).any()) throw ContractViolation("transition matrix has negative entries");
  const Eigen::VectorXd sums = p.rowwise().sum();
  if (((sums.array() - 1.0).abs() > 1e-12).any())
    throw ContractViolation("transition matrix rows must sum to 1");
}

std::vector<std::uint8_t> reachable(const Eigen::MatrixXd& p, bool forward) {
  const Eigen::Index n = p.rows();
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<Eigen::Index> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const Eigen::Index i = stack.back();
    stack.pop_back();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = forward ? p(i, j) : p(j, i);
      if (w > 0 && !seen[j]) {
        seen[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_irreducible(const Eigen::MatrixXd& transition) {
  check_stochastic(transition);
  const auto fwd = reachable(transition, true);
  const auto bwd = reachable(transition, false);
  return std::all_of(fwd.begin(), fwd.end(), [](auto x) { return x != 0; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](auto x) { return x != 0; });
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition) {
  if (!is_irreducible(transition)) throw DomainError("stationary_distribution: chain is reducible");
  const Eigen::Index n = transition.rows();
  // pi (P - I) = 0 with the last equation replaced by sum(pi) = 1.
  Eigen::MatrixXd a = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
  return pi;
}

KacResult kac_check(const Eigen::MatrixXd& transition, std::span<const std::size_t> event,
                    std::uint64_t samples, RngStream& rng, double confidence) {
  const Eigen::VectorXd pi = stationary_distribution(transition);
  const Eigen::Index n = transition.rows();
  if (event.empty()) throw ContractViolation("kac_check: empty event");
  std::vector<std::uint8_t> in_event(n, 0);
  for (const std::size_t s : event) {
    if (s >= static_cast<std::size_t>(n)) throw ContractViolation("kac_check: state out of range");
    in_event[s] = 1;
  }
  std::vector<double> start_cdf;
  std::vector<Eigen::Index> start_state;
  double p_event = 0;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (!in_event[s]) continue;
    p_event += pi(s);
    start_cdf.push_back(p_event);
    start_state.push_back(s);
  }
  std::vector<std::vector<double>> row_cdf(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0;
    for (Eigen::Index j = 0; j < n; ++j) row_cdf[i].push_back(acc += transition(i, j));
  }
  auto draw = [&](const std::vector<double>& cdf) {
    const double u = rng.uniform01() * cdf.back();
    return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  };

  RunningStats tau;
  for (std::uint64_t k = 0; k < samples; ++k) {
    Eigen::Index state = start_state[std::min(draw(start_cdf), start_state.size() - 1)];
    std::uint64_t steps = 0;
    do {
      state = static_cast<Eigen::Index>(std::min<std::size_t>(draw(row_cdf[state]), n - 1));
      ++steps;
    } while (!in_event[state]);
    tau.add(static_cast<double>(steps));
  }
  KacResult out;
  out.samples = samples;
  out.event_probability = p_event;
  out.inverse_event_probability = 1.0 / p_event;
  out.mean_return_time = tau.mean();
  out.half_width = tau.half_width(confidence);
  return out;
}

}  // namespace forestlab
