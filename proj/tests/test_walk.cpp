#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "forestlab/stats.hpp"
#include "forestlab/walk.hpp"
#include "oracles.hpp"

using namespace forestlab;

TEST_CASE("run_srw examples") {
  RngStream rng(1, 0);
  const Graph tri(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(run_srw(tri, 1, HitSet{{1, 2}}, rng) == Path{1});

  const Graph wired = build_lattice_box({1, 1, Boundary::Wired});
  for (int i = 0; i < 100; ++i) {
    const Path p = run_srw(wired, 1, HitWired{}, rng);
    CHECK(p.back() == 3);
    for (std::size_t k = 0; k + 1 < p.size(); ++k) CHECK(p[k] != 3);
  }

  const Graph line = build_lattice_box({1, 5, Boundary::Free});
  int back = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) back += run_srw(line, 5, FixedSteps{2}, rng).back() == 5;
  CHECK(std::abs(back / double(n) - 0.5) < 4 * std::sqrt(0.25 / n));

  CHECK_THROWS_AS(run_srw(line, 5, FixedSteps{1000}, rng, {100}), ResourceError);
  const Graph split(4, {{0, 1}, {2, 3}});
  CHECK_THROWS_AS(run_srw(split, 0, HitSet{{3}}, rng, {1000}), StepBudgetExceeded);
  CHECK_THROWS_AS(run_srw(tri, 0, HitWired{}, rng), DomainError);
}

TEST_CASE("parallel edges count with multiplicity") {
  RngStream rng(2, 0);
  const Graph g(3, {{0, 1}, {0, 1}, {0, 2}});
  int to1 = 0;
  const int n = 30000;
  for (int i = 0; i < n; ++i) to1 += run_srw(g, 0, FixedSteps{1}, rng).back() == 1;
  CHECK(std::abs(to1 / double(n) - 2.0 / 3) < 4 * std::sqrt(2.0 / 9 / n));
}

TEST_CASE("loop_erase examples") {
  CHECK(loop_erase(Path{0, 1, 0, 2}) == Path{0, 2});
  CHECK(loop_erase(Path{3, 1, 4, 5}) == Path{3, 1, 4, 5});
  CHECK(loop_erase(Path{0, 1, 2, 1, 0, 3}) == Path{0, 3});
  CHECK(loop_erase(Path{7}) == Path{7});
  CHECK(loop_erase(Path{}).empty());
}

TEST_CASE("loop_erase laws against the definition on random paths") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 3000; ++trial) {
    std::uniform_int_distribution<Vertex> site(0, 2 + trial % 9);
    Path p(1 + trial % 40);
    for (auto& v : p) v = site(gen);
    const Path le = loop_erase(p);
    CHECK(le == oracle::loop_erase(p));
    CHECK(loop_erase(le) == le);
    CHECK(le.front() == p.front());
    CHECK(le.back() == p.back());
    std::vector<Vertex> sorted = le;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    std::size_t j = 0;
    for (std::size_t i = 0; i < p.size() && j < le.size(); ++i) j += p[i] == le[j];
    CHECK(j == le.size());
    // the prefix before the first revisit is already simple, so it is kept
    std::size_t first_repeat = p.size();
    for (std::size_t i = 0; i < p.size() && first_repeat == p.size(); ++i) {
      for (std::size_t k = 0; k < i; ++k) {
        if (p[k] == p[i]) {
          first_repeat = i;
          break;
        }
      }
    }
    const Path prefix(p.begin(), p.begin() + first_repeat);
    CHECK(loop_erase(prefix) == prefix);
    LoopEraser<Vertex> online;
    for (const Vertex v : p) online.push(v);
    CHECK(online.path() == le);
    CHECK(online.length() == path_length(le));
  }
}

TEST_CASE("cut_times examples and oracle") {
  const Path mono{0, 1, 2, 3, 4};
  CHECK(cut_times(mono) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  const auto bounce = cut_times(Path{0, 1, 0});
  CHECK(std::find(bounce.begin(), bounce.end(), 1) == bounce.end());
  const auto mixed = cut_times(Path{0, 1, 2, 1, 3});
  CHECK(std::find(mixed.begin(), mixed.end(), 0) != mixed.end());
  CHECK(std::find(mixed.begin(), mixed.end(), 2) == mixed.end());

  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<Vertex> site(0, 3 + trial % 12);
    Path p(1 + trial % 25);
    for (auto& v : p) v = site(gen);
    CHECK(cut_times(p) == oracle::cut_times(p));
    const Path le = loop_erase(p);
    CHECK(cut_times(le).size() == le.size());
  }
}

TEST_CASE("marked loops") {
  CHECK_THROWS_AS(MarkedLoop(Path{0, 1, 2}, MarkedLoop::Time{0}), ContractViolation);
  CHECK_THROWS_AS(MarkedLoop(Path{0, 1, 0}, MarkedLoop::Time{3}), ContractViolation);
  CHECK_THROWS_AS(MarkedLoop(Path{0, 1, 0}, MarkedLoop::Step{2}), ContractViolation);
  const MarkedLoop loop(Path{0, 1, 0}, MarkedLoop::Step{1});
  CHECK(loop.length() == 2);
  CHECK(loop.weight(3) == doctest::Approx(1.0 / 36));
  const MarkedLoop trivial(Path{4}, MarkedLoop::Time{0});
  CHECK(trivial.weight(5) == 1.0);
}

TEST_CASE("stationary law and Kac examples") {
  Eigen::MatrixXd two(2, 2);
  two << 0.5, 0.5, 0.5, 0.5;
  const Eigen::VectorXd pi = stationary_distribution(two);
  CHECK(pi(0) == doctest::Approx(0.5));
  RngStream rng(3, 0);
  const std::size_t zero[] = {0};
  const KacResult k2 = kac_check(two, zero, 100000, rng);
  CHECK(k2.inverse_event_probability == doctest::Approx(2.0));
  CHECK(std::abs(k2.mean_return_time - 2.0) <= k2.half_width);

  const std::size_t both[] = {0, 1};
  const KacResult all = kac_check(two, both, 1000, rng);
  CHECK(all.mean_return_time == 1.0);
  CHECK(all.inverse_event_probability == doctest::Approx(1.0));

  Eigen::MatrixXd cycle = Eigen::MatrixXd::Zero(3, 3);
  cycle(0, 1) = cycle(1, 2) = cycle(2, 0) = 1;
  const KacResult k3 = kac_check(cycle, zero, 1000, rng);
  CHECK(k3.mean_return_time == 3.0);
  CHECK(k3.inverse_event_probability == doctest::Approx(3.0));

  // lazy asymmetric chain: pi = (2/3, 1/3)
  Eigen::MatrixXd lazy(2, 2);
  lazy << 0.75, 0.25, 0.5, 0.5;
  const std::size_t one[] = {1};
  const KacResult k4 = kac_check(lazy, one, 200000, rng);
  CHECK(k4.inverse_event_probability == doctest::Approx(3.0));
  CHECK(std::abs(k4.mean_return_time - 3.0) <= k4.half_width);

  Eigen::MatrixXd reducible = Eigen::MatrixXd::Identity(2, 2);
  CHECK_FALSE(is_irreducible(reducible));
  CHECK_THROWS_AS(kac_check(reducible, zero, 10, rng), DomainError);
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.4, 0.5, 0.5;
  CHECK_THROWS_AS(stationary_distribution(bad), ContractViolation);
}

TEST_CASE("LERW reversal symmetry on a 5-vertex graph") {
  const Graph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {1, 3}, {0, 2}, {1, 3}});
  for (const auto& [a, b] : std::vector<std::pair<Vertex, Vertex>>{{0, 3}, {1, 4}, {2, 4}}) {
    double ra = 0, rb = 0;
    const auto forward = oracle::lerw_law(g, a, b, 1e-14, ra);
    const auto backward = oracle::lerw_law(g, b, a, 1e-14, rb);
    CHECK(forward.size() == backward.size());
    for (const auto& [path, p] : backward) {
      std::vector<Vertex> rev(path.rbegin(), path.rend());
      const auto it = forward.find(rev);
      REQUIRE(it != forward.end());
      CHECK(std::abs(it->second - p) <= 1e-12 + ra + rb);
    }
  }
}

TEST_CASE("sampled loop erasures follow the exact law") {
  const Graph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {1, 3}, {0, 2}});
  double residual = 0;
  const auto law = oracle::lerw_law(g, 0, 3, 1e-14, residual);
  std::map<Path, double> counts;
  RngStream rng(4, 0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) counts[loop_erase(run_srw(g, 0, HitSet{{3}}, rng))] += 1;
  std::vector<double> observed, expected;
  for (const auto& [path, p] : law) {
    observed.push_back(counts.count(path) ? counts[path] : 0.0);
    expected.push_back(p);
  }
  double seen = 0;
  for (const double x : observed) seen += x;
  CHECK(seen == n);  // nothing outside the support
  CHECK(chi_square_goodness_of_fit(observed, expected).p_value > 1e-3);
}
