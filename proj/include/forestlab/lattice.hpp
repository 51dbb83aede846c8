#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "forestlab/rng.hpp"

namespace forestlab {

/// A site of Z^d packed into 128 bits: each axis gets 128/d bits holding the
/// coordinate plus a bias, so neighbouring sites differ by a single shifted
/// unit and keys hash cheaply.
using SiteKey = unsigned __int128;

struct SiteKeyHash {
  std::size_t operator()(SiteKey k) const noexcept {
    const auto lo = static_cast<std::uint64_t>(k);
    const auto hi = static_cast<std::uint64_t>(k >> 64);
    std::uint64_t h = lo * 0x9E3779B97F4A7C15ull ^ (hi + 0x632BE59BD9B4E019ull);
    h ^= h >> 32;
    h *= 0xD6E8FEB86659FD93ull;
    h ^= h >> 32;
    return static_cast<std::size_t>(h);
  }
};

class SiteCodec {
 public:
  explicit SiteCodec(int dimension);

  int dimension() const noexcept { return d_; }
  /// Largest |coordinate| representable.
  int limit() const noexcept { return limit_; }
  SiteKey origin() const noexcept { return origin_; }
  SiteKey unit(int axis) const noexcept { return SiteKey{1} << (axis * bits_); }
  SiteKey encode(std::span<const int> coords) const;
  std::vector<int> decode(SiteKey key) const;
  int coordinate(SiteKey key, int axis) const noexcept {
    const auto mask = (SiteKey{1} << bits_) - 1;
    return static_cast<int>(static_cast<std::int64_t>((key >> (axis * bits_)) & mask) - bias_);
  }

 private:
  int d_;
  int bits_;
  std::int64_t bias_;
  int limit_;
  SiteKey origin_;
};

/// Simple random walk on Z^d tracking coordinates; leaving the codec's range
/// raises ResourceError.
class LatticeWalker {
 public:
  explicit LatticeWalker(const SiteCodec& codec);
  SiteKey site() const noexcept { return site_; }
  const std::vector<int>& coords() const noexcept { return coords_; }
  SiteKey step(RngStream& rng);

 private:
  const SiteCodec* codec_;
  SiteKey site_;
  std::vector<int> coords_;
};

/// Sites S(0..steps) of a walk from the origin.
std::vector<SiteKey> lattice_walk(const SiteCodec& codec, std::uint64_t steps, RngStream& rng);

/// Exact p_t(o,o) for t = 0..max_t, by splitting a Z^k walk into its
/// binomially many steps along the last axis and a Z^(k-1) walk.
std::vector<double> return_probabilities(int dimension, std::uint64_t max_t);

/// Exact law of S(t) from the origin (small t): (coordinates, probability).
std::vector<std::pair<std::vector<int>, double>> heat_kernel_row(int dimension, int t);

struct HeatKernelOptions {
  std::uint64_t exact_budget = 200'000'000;  // on d*t
  std::uint64_t samples = 1'000'000;
  double confidence = 0.999;
};

struct HeatKernelValue {
  double value = 0;
  double half_width = 0;
  bool exact = true;
};

/// p_t(o,o): exact when d*t is within budget, else Monte Carlo with a CI.
HeatKernelValue heat_kernel(int dimension, std::uint64_t t, RngStream& rng,
                            const HeatKernelOptions& options = {});

/// Z_i = sum_t (t+1)^i p_t(o,o) truncated at t <= T, plus a tail bound from
/// p_t(o,o) <= C t^(-d/2) for t > T.
///
/// C is the larger of the local-limit constant 2 (d / 2 pi)^(d/2) and the
/// largest value of p_t t^(d/2) over the even t in [T/2, T]; t^(d/2) p_t
/// increases to the local-limit constant, which the tests check.
struct ZValues {
  int dimension = 0;
  std::uint64_t truncation = 0;
  double tail_constant = 0;
  double z1_truncated = 0;
  double z1_tail = 0;
  std::optional<double> z2_truncated;  // only for d >= 7
  std::optional<double> z2_tail;

  double z1_upper() const { return z1_truncated + z1_tail; }
  double z2_upper() const;
};

/// Z_1 diverges below d = 5 (DomainError); Z_2 is left empty below d = 7.
ZValues z_values(int dimension, std::uint64_t truncation);

/// sum_{t > T, t even} (t+1)^i C t^(-d/2), bounded analytically.
double z_tail_bound(int dimension, int order, std::uint64_t truncation, double constant,
                    std::span<const double> return_probs = {});

struct TwoSidedLerwOptions {
  std::uint64_t horizon = 100'000;
  std::uint64_t attempt_cap = 10'000;
  bool require_separation = true;
  double tail_fraction = 0.25;
};

/// Accepted two-sided loop-erased path: path[origin_offset] is the origin,
/// entries before it are LE[S^2] reversed, entries after it LE[S^1].
struct TwoSidedLerw {
  std::vector<SiteKey> path;
  std::size_t origin_offset = 0;
  bool accepted = false;
  std::uint64_t attempts = 0;
  std::uint64_t event_rejections = 0;       // E failed inside the window
  std::uint64_t separation_rejections = 0;  // E held, bounding boxes overlapped

  SiteKey at(std::int64_t i) const { return path[origin_offset + i]; }
  std::int64_t first_index() const { return -static_cast<std::int64_t>(origin_offset); }
  std::int64_t last_index() const {
    return static_cast<std::int64_t>(path.size() - origin_offset) - 1;
  }
};

/// Rejection sampler for the non-intersection event: LE[S^1](m) != S^2(n)
/// for all m >= 0, n >= 1, checked over the window. With
/// require_separation an accepted pair must also have disjoint bounding
/// boxes over the final tail_fraction of LE[S^1] and of S^2.
TwoSidedLerw two_sided_lerw(int dimension, const TwoSidedLerwOptions& options, RngStream& rng);

/// One attempt at the event inside the window (no separation certificate).
bool non_intersection_event(int dimension, std::uint64_t horizon, RngStream& rng);

/// T_0..T_n of a two-sided walk over [-horizon, horizon]. Entries are
/// missing when the window holds fewer cut times; then censored is set.
struct CutTimeSample {
  std::vector<std::int64_t> times;
  bool censored = false;
};

/// L_0..L_n over the forward walk S[0, horizon].
struct LerwCountSample {
  std::vector<std::uint64_t> counts;
  std::vector<std::uint8_t> censored;  // per level: final LE length <= n
  std::uint64_t final_length = 0;
};

struct TwoSidedWalkStats {
  CutTimeSample cut;
  LerwCountSample lerw;
};

/// Both statistics from one two-sided walk; the forward half is shared.
TwoSidedWalkStats sample_cut_and_lerw(int dimension, unsigned n_max, std::uint64_t horizon,
                                      RngStream& rng);

CutTimeSample cut_time_T_n(int dimension, unsigned n, std::uint64_t horizon, RngStream& rng);
LerwCountSample lerw_length_counter_L_n(int dimension, unsigned n, std::uint64_t horizon,
                                        RngStream& rng);

/// Cut times and T_0 from explicit sites: backward[i] = S(-i), forward[i] =
/// S(i), both starting at the origin.
CutTimeSample cut_times_two_sided(std::span<const SiteKey> backward,
                                  std::span<const SiteKey> forward, unsigned n);

/// L_0..L_n of a finite forward walk.
LerwCountSample lerw_counts(std::span<const SiteKey> forward, unsigned n);

}  // namespace forestlab
