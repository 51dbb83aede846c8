#include "forestlab/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "forestlab/errors.hpp"

namespace forestlab {

void RunningStats::add(double x) {
  if (n_ == 0) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double total = na + nb;
  mean_ += delta * nb / total;
  m2_ += other.m2_ + delta * delta * na * nb / total;
  n_ += other.n_;
  min_ = std::min(min_, other.min_);
  max_ = std::max(max_, other.max_);
}

double RunningStats::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::standard_error() const {
  return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double RunningStats::half_width(double confidence) const {
  return normal_quantile(0.5 + confidence / 2) * standard_error();
}

double normal_quantile(double p) {
  if (!(p > 0 && p < 1)) throw ContractViolation("normal_quantile: p must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<>(), p);
}

namespace {

double chi_square_sf(double statistic, int dof) {
  if (dof <= 0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<>(dof),
                                                  statistic));
}

}  // namespace

ChiSquareResult chi_square_goodness_of_fit(std::span<const double> observed,
                                           std::span<const double> probabilities,
                                           double min_expected) {
  if (observed.size() != probabilities.size())
    throw ContractViolation("chi_square_goodness_of_fit: size mismatch");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  ChiSquareResult out;
  out.pooled_from = observed.size();
  double pooled_obs = 0, pooled_exp = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = probabilities[i] * total;
    if (expected < min_expected) {
      pooled_obs += observed[i];
      pooled_exp += expected;
      continue;
    }
    out.statistic += (observed[i] - expected) * (observed[i] - expected) / expected;
    ++out.cells;
  }
  if (pooled_exp > 0) {
    out.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++out.cells;
  } else if (pooled_obs > 0) {
    // Mass on cells of probability zero.
    out.statistic = std::numeric_limits<double>::infinity();
  }
  out.dof = static_cast<int>(out.cells) - 1;
  out.p_value = std::isinf(out.statistic) ? 0.0 : chi_square_sf(out.statistic, out.dof);
  return out;
}

ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b,
                                      double min_pooled) {
  if (a.size() != b.size()) throw ContractViolation("chi_square_two_sample: size mismatch");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  ChiSquareResult out;
  out.pooled_from = a.size();
  if (na == 0 || nb == 0) return out;
  std::vector<std::pair<double, double>> cells;
  std::pair<double, double> rest{0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] + b[i] < min_pooled) {
      rest.first += a[i];
      rest.second += b[i];
    } else {
      cells.emplace_back(a[i], b[i]);
    }
  }
  if (rest.first + rest.second > 0) cells.push_back(rest);
  const double n = na + nb;
  for (const auto& [x, y] : cells) {
    const double pooled = x + y;
    const double ea = pooled * na / n;
    const double eb = pooled * nb / n;
    out.statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
  }
  out.cells = cells.size();
  out.dof = static_cast<int>(out.cells) - 1;
  out.p_value = chi_square_sf(out.statistic, out.dof);
  return out;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractViolation("total_variation: size mismatch");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  if (na == 0 || nb == 0) throw ContractViolation("total_variation: empty sample");
  double tv = 0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] / na - b[i] / nb);
  return tv / 2;
}

std::vector<double> multinomial_counts(std::span<const double> probabilities,
                                       std::uint64_t trials, RngStream& rng) {
  std::vector<double> out(probabilities.size(), 0.0);
  double remaining_mass = 1.0;
  std::uint64_t remaining = trials;
  for (std::size_t i = 0; i < probabilities.size() && remaining > 0; ++i) {
    if (i + 1 == probabilities.size() || remaining_mass <= probabilities[i]) {
      out[i] = static_cast<double>(remaining);
      break;
    }
    const double p = std::clamp(probabilities[i] / remaining_mass, 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> binomial(remaining, p);
    const std::uint64_t k = binomial(rng);
    out[i] = static_cast<double>(k);
    remaining -= k;
    remaining_mass -= probabilities[i];
  }
  return out;
}

BootstrapResult bootstrap_tv_null(std::span<const double> a, std::span<const double> b,
                                  std::size_t resamples, double confidence, RngStream& rng) {
  if (resamples == 0) throw ContractViolation("bootstrap_tv_null: no resamples requested");
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  BootstrapResult out;
  out.observed = total_variation(a, b);
  std::vector<double> pooled(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) pooled[i] = (a[i] + b[i]) / (na + nb);
  std::vector<double> null_tv(resamples);
  for (auto& tv : null_tv) {
    const auto ra = multinomial_counts(pooled, static_cast<std::uint64_t>(na), rng);
    const auto rb = multinomial_counts(pooled, static_cast<std::uint64_t>(nb), rng);
    tv = total_variation(ra, rb);
  }
  out.null_mean = std::accumulate(null_tv.begin(), null_tv.end(), 0.0) /
                  static_cast<double>(resamples);
  std::sort(null_tv.begin(), null_tv.end());
  const auto index = static_cast<std::size_t>(
      std::ceil(confidence * static_cast<double>(resamples))) - 1;
  out.null_quantile = null_tv[std::min(index, resamples - 1)];
  out.within = out.observed <= out.null_quantile;
  return out;
}

OriginFit fit_through_origin(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty())
    throw ContractViolation("fit_through_origin: need equal, nonempty inputs");
  double xx = 0, xy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx += x[i] * x[i];
    xy += x[i] * y[i];
  }
  OriginFit fit;
  fit.slope = xx > 0 ? xy / xx : 0.0;
  fit.residuals.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) fit.residuals[i] = y[i] - fit.slope * x[i];
  return fit;
}

}  // namespace forestlab
