#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "forestlab/rng.hpp"

namespace forestlab {

// Welford accumulator; merge() is associative so replica batches can be
// reduced in any grouping.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const;  // unbiased
  double standard_error() const;
  /// Normal-approximation half-width at two-sided confidence level.
  double half_width(double confidence) const;
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0;
  double m2_ = 0;
  double min_ = 0;
  double max_ = 0;
};

double normal_quantile(double p);

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  std::size_t cells = 0;       // cells after pooling
  std::size_t pooled_from = 0;  // cells before pooling
};

/// Goodness of fit of observed counts to a probability vector. Cells with
/// expected count below min_expected are pooled into one cell.
ChiSquareResult chi_square_goodness_of_fit(std::span<const double> observed,
                                           std::span<const double> probabilities,
                                           double min_expected = 5);

/// Two-sample homogeneity test on aligned count vectors. Cells whose pooled
/// count is below min_pooled are merged.
ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b,
                                      double min_pooled = 10);

/// Total variation between the empirical laws of two count vectors.
double total_variation(std::span<const double> a, std::span<const double> b);

struct BootstrapResult {
  double observed = 0;
  double null_quantile = 0;
  double null_mean = 0;
  bool within = false;
};

/// Null distribution of the TV statistic under equal laws: both samples are
/// redrawn from the pooled empirical law with their original sizes.
BootstrapResult bootstrap_tv_null(std::span<const double> a, std::span<const double> b,
                                  std::size_t resamples, double confidence, RngStream& rng);

/// Multinomial draw of `trials` items over the given probabilities.
std::vector<double> multinomial_counts(std::span<const double> probabilities,
                                       std::uint64_t trials, RngStream& rng);

/// Least-squares slope through the origin and the residuals.
struct OriginFit {
  double slope = 0;
  std::vector<double> residuals;
};
OriginFit fit_through_origin(std::span<const double> x, std::span<const double> y);

}  // namespace forestlab
