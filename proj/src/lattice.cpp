#include "forestlab/lattice.hpp"

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "forestlab/errors.hpp"
#include "forestlab/stats.hpp"
#include "forestlab/walk.hpp"

namespace forestlab {

SiteCodec::SiteCodec(int dimension) : d_(dimension) {
  if (dimension < 1 || dimension > 32)
    throw ContractViolation("SiteCodec: dimension must lie in [1, 32]");
  bits_ = std::min(128 / dimension, 32);
  bias_ = std::int64_t{1} << (bits_ - 1);
  limit_ = static_cast<int>(std::min<std::int64_t>(bias_ - 1, std::numeric_limits<int>::max()));
  origin_ = 0;
  for (int axis = 0; axis < d_; ++axis) origin_ |= static_cast<SiteKey>(bias_) << (axis * bits_);
}

SiteKey SiteCodec::encode(std::span<const int> coords) const {
  if (static_cast<int>(coords.size()) != d_) throw ContractViolation("SiteCodec: wrong arity");
  SiteKey key = 0;
  for (int axis = 0; axis < d_; ++axis) {
    if (std::abs(coords[axis]) > limit_)
      throw ResourceError("SiteCodec: coordinate " + std::to_string(coords[axis]) +
                          " outside the representable range");
    key |= static_cast<SiteKey>(coords[axis] + bias_) << (axis * bits_);
  }
  return key;
}

std::vector<int> SiteCodec::decode(SiteKey key) const {
  std::vector<int> out(d_);
  for (int axis = 0; axis < d_; ++axis) out[axis] = coordinate(key, axis);
  return out;
}

LatticeWalker::LatticeWalker(const SiteCodec& codec)
    : codec_(&codec), site_(codec.origin()), coords_(codec.dimension(), 0) {}

SiteKey LatticeWalker::step(RngStream& rng) {
  const auto r = rng.uniform_index(2 * static_cast<std::uint64_t>(codec_->dimension()));
  const int axis = static_cast<int>(r >> 1);
  if (r & 1) {
    if (--coords_[axis] < -codec_->limit())
      throw ResourceError("LatticeWalker: walk left the representable range");
    site_ -= codec_->unit(axis);
  } else {
    if (++coords_[axis] > codec_->limit())
      throw ResourceError("LatticeWalker: walk left the representable range");
    site_ += codec_->unit(axis);
  }
  return site_;
}

std::vector<SiteKey> lattice_walk(const SiteCodec& codec, std::uint64_t steps, RngStream& rng) {
  std::vector<SiteKey> sites;
  sites.reserve(steps + 1);
  LatticeWalker walker(codec);
  sites.push_back(walker.site());
  for (std::uint64_t i = 0; i < steps; ++i) sites.push_back(walker.step(rng));
  return sites;
}

std::vector<double> return_probabilities(int dimension, std::uint64_t max_t) {
  if (dimension < 1) throw ContractViolation("return_probabilities: dimension must be >= 1");
  const std::size_t n = max_t + 1;
  std::vector<double> current(n, 0.0);
  current[0] = 1.0;
  for (std::size_t t = 2; t < n; t += 2) {
    current[t] = current[t - 2] * static_cast<double>(t - 1) / static_cast<double>(t);
  }
  if (dimension == 1) return current;
  const std::vector<double> one_dim = current;
  std::vector<double> log_fact(n);
  for (std::size_t i = 0; i < n; ++i) log_fact[i] = std::lgamma(static_cast<double>(i) + 1.0);

  std::vector<double> next(n, 0.0);
  for (int k = 2; k <= dimension; ++k) {
    const double p = 1.0 / k;
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t t = 0; t < n; t += 2) {
      const double td = static_cast<double>(t);
      const double sigma = std::sqrt(td * p * (1 - p));
      // Binomial mass beyond 12 sigma is far below double precision.
      const double lo_d = std::max(0.0, std::floor(td * p - 12 * sigma - 12));
      const double hi_d = std::min(td, std::ceil(td * p + 12 * sigma + 12));
      std::size_t lo = static_cast<std::size_t>(lo_d);
      const auto hi = static_cast<std::size_t>(hi_d);
      lo += lo & 1;
      double sum = 0;
      for (std::size_t s = lo; s <= hi; s += 2) {
        const double log_binom = log_fact[t] - log_fact[s] - log_fact[t - s] +
                                 static_cast<double>(s) * log_p +
                                 static_cast<double>(t - s) * log_q;
        sum += std::exp(log_binom) * one_dim[s] * current[t - s];
      }
      next[t] = sum;
    }
    current.swap(next);
  }
  return current;
}

std::vector<std::pair<std::vector<int>, double>> heat_kernel_row(int dimension, int t) {
  if (t < 0) throw ContractViolation("heat_kernel_row: negative time");
  const SiteCodec codec(dimension);
  if (t > codec.limit()) throw ResourceError("heat_kernel_row: time too large");
  absl::flat_hash_map<SiteKey, double, SiteKeyHash> law{{codec.origin(), 1.0}};
  const double w = 1.0 / (2.0 * dimension);
  for (int step = 0; step < t; ++step) {
    absl::flat_hash_map<SiteKey, double, SiteKeyHash> next;
    next.reserve(law.size() * 2);
    for (const auto& [site, mass] : law) {
      for (int axis = 0; axis < dimension; ++axis) {
        next[site + codec.unit(axis)] += mass * w;
        next[site - codec.unit(axis)] += mass * w;
      }
    }
    if (next.size() > 50'000'000) throw ResourceError("heat_kernel_row: state space too large");
    law.swap(next);
  }
  std::vector<std::pair<std::vector<int>, double>> out;
  out.reserve(law.size());
  for (const auto& [site, mass] : law) out.emplace_back(codec.decode(site), mass);
  std::sort(out.begin(), out.end());
  return out;
}

HeatKernelValue heat_kernel(int dimension, std::uint64_t t, RngStream& rng,
                            const HeatKernelOptions& options) {
  if (dimension < 1) throw ContractViolation("heat_kernel: dimension must be >= 1");
  HeatKernelValue out;
  if (static_cast<std::uint64_t>(dimension) * t <= options.exact_budget) {
    out.value = return_probabilities(dimension, t)[t];
    return out;
  }
  out.exact = false;
  if (t % 2 == 1) return out;  // bipartite: exact zero
  const SiteCodec codec(dimension);
  RunningStats hits;
  for (std::uint64_t k = 0; k < options.samples; ++k) {
    LatticeWalker walker(codec);
    for (std::uint64_t i = 0; i < t; ++i) walker.step(rng);
    hits.add(walker.site() == codec.origin() ? 1.0 : 0.0);
  }
  out.value = hits.mean();
  out.half_width = hits.half_width(options.confidence);
  return out;
}

double z_tail_bound(int dimension, int order, std::uint64_t truncation, double constant,
                    std::span<const double> return_probs) {
  const double a = dimension / 2.0 - order;
  if (a <= 1) {
    throw DomainError("Z_" + std::to_string(order) + " diverges below dimension " +
                      std::to_string(2 * order + 3));
  }
  if (truncation < 2) {
    std::vector<double> local;
    if (return_probs.size() < 3) {
      local = return_probabilities(dimension, 2);
      return_probs = local;
    }
    double explicit_terms = 0;
    for (std::uint64_t t = truncation + 1; t <= 2; ++t)
      explicit_terms += std::pow(static_cast<double>(t + 1), order) * return_probs[t];
    return explicit_terms + z_tail_bound(dimension, order, 2, constant);
  }
  // Even t >= T+1: (t+1)^i <= (1 + 1/(T+1))^i t^i, and each term is at most
  // half the integral of C x^(i-d/2) over [t-2, t].
  const double big_t = static_cast<double>(truncation);
  return constant * std::pow(1.0 + 1.0 / (big_t + 1.0), order) * std::pow(big_t - 1.0, 1.0 - a) /
         (2.0 * (a - 1.0));
}

double ZValues::z2_upper() const {
  if (!z2_truncated) throw DomainError("Z_2 diverges below dimension 7");
  return *z2_truncated + *z2_tail;
}

ZValues z_values(int dimension, std::uint64_t truncation) {
  if (dimension < 5) throw DomainError("Z_1 diverges below dimension 5");
  const auto p = return_probabilities(dimension, std::max<std::uint64_t>(truncation, 2));
  ZValues z;
  z.dimension = dimension;
  z.truncation = truncation;
  const double half_d = dimension / 2.0;
  z.tail_constant = 2.0 * std::pow(dimension / (2.0 * std::numbers::pi), half_d);
  for (std::uint64_t t = std::max<std::uint64_t>(2, (truncation + 1) / 2); t <= truncation; ++t) {
    if (t % 2 == 0)
      z.tail_constant = std::max(z.tail_constant, p[t] * std::pow(static_cast<double>(t), half_d));
  }
  double z1 = 0, z2 = 0;
  for (std::uint64_t t = 0; t <= truncation; ++t) {
    const double w = static_cast<double>(t + 1);
    z1 += w * p[t];
    z2 += w * w * p[t];
  }
  z.z1_truncated = z1;
  z.z1_tail = z_tail_bound(dimension, 1, truncation, z.tail_constant, p);
  if (dimension >= 7) {
    z.z2_truncated = z2;
    z.z2_tail = z_tail_bound(dimension, 2, truncation, z.tail_constant, p);
  }
  return z;
}

namespace {

struct BoundingBox {
  std::vector<int> lo, hi;
};

BoundingBox bounding_box(const SiteCodec& codec, std::span<const SiteKey> sites) {
  const int d = codec.dimension();
  BoundingBox box{std::vector<int>(d, std::numeric_limits<int>::max()),
                  std::vector<int>(d, std::numeric_limits<int>::min())};
  for (const SiteKey s : sites) {
    for (int axis = 0; axis < d; ++axis) {
      const int c = codec.coordinate(s, axis);
      box.lo[axis] = std::min(box.lo[axis], c);
      box.hi[axis] = std::max(box.hi[axis], c);
    }
  }
  return box;
}

bool disjoint(const BoundingBox& a, const BoundingBox& b) {
  for (std::size_t axis = 0; axis < a.lo.size(); ++axis) {
    if (a.hi[axis] < b.lo[axis] || b.hi[axis] < a.lo[axis]) return true;
  }
  return false;
}

std::span<const SiteKey> tail(const std::vector<SiteKey>& v, double fraction) {
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(v.size()))), 1, v.size());
  return std::span<const SiteKey>(v).last(k);
}

bool misses(const absl::flat_hash_set<SiteKey, SiteKeyHash>& trace,
            const std::vector<SiteKey>& walk) {
  for (std::size_t n = 1; n < walk.size(); ++n) {
    if (trace.contains(walk[n])) return false;
  }
  return true;
}

void require_transient_pair(int dimension) {
  if (dimension < 5)
    throw DomainError("the non-intersection event has probability zero below dimension 5");
}

void require_cut_dimension(int dimension) {
  if (dimension < 7) throw DomainError("cut-time estimators require dimension >= 7");
}

}  // namespace

bool non_intersection_event(int dimension, std::uint64_t horizon, RngStream& rng) {
  require_transient_pair(dimension);
  const SiteCodec codec(dimension);
  const auto s1 = lattice_walk(codec, horizon, rng);
  const auto s2 = lattice_walk(codec, horizon, rng);
  const auto le1 = loop_erase<SiteKey, SiteKeyHash>(s1);
  const absl::flat_hash_set<SiteKey, SiteKeyHash> trace(le1.begin(), le1.end());
  return misses(trace, s2);
}

TwoSidedLerw two_sided_lerw(int dimension, const TwoSidedLerwOptions& options, RngStream& rng) {
  require_transient_pair(dimension);
  if (options.horizon == 0) throw ContractViolation("two_sided_lerw: horizon must be positive");
  const SiteCodec codec(dimension);
  TwoSidedLerw out;
  while (out.attempts < options.attempt_cap) {
    ++out.attempts;
    const auto s1 = lattice_walk(codec, options.horizon, rng);
    const auto s2 = lattice_walk(codec, options.horizon, rng);
    const auto le1 = loop_erase<SiteKey, SiteKeyHash>(s1);
    const absl::flat_hash_set<SiteKey, SiteKeyHash> trace(le1.begin(), le1.end());
    if (!misses(trace, s2)) {
      ++out.event_rejections;
      continue;
    }
    if (options.require_separation &&
        !disjoint(bounding_box(codec, tail(le1, options.tail_fraction)),
                  bounding_box(codec, tail(s2, options.tail_fraction)))) {
      ++out.separation_rejections;
      continue;
    }
    const auto le2 = loop_erase<SiteKey, SiteKeyHash>(s2);
    out.path.assign(le2.rbegin(), le2.rend());
    out.origin_offset = le2.size() - 1;
    out.path.insert(out.path.end(), le1.begin() + 1, le1.end());
    out.accepted = true;
    return out;
  }
  throw StatisticalFailure("two_sided_lerw: no accepted sample within " +
                               std::to_string(options.attempt_cap) + " attempts",
                           out.attempts);
}

CutTimeSample cut_times_two_sided(std::span<const SiteKey> backward,
                                  std::span<const SiteKey> forward, unsigned n) {
  if (backward.empty() || forward.empty() || backward[0] != forward[0])
    throw ContractViolation("cut_times_two_sided: both halves must start at the origin");
  const auto hb = static_cast<std::int64_t>(backward.size()) - 1;
  const auto hf = static_cast<std::int64_t>(forward.size()) - 1;
  absl::flat_hash_map<SiteKey, std::pair<std::int64_t, std::int64_t>, SiteKeyHash> seen;
  seen.reserve(backward.size() + forward.size());
  for (std::int64_t i = -hb; i < 0; ++i) {
    auto [it, inserted] = seen.try_emplace(backward[-i], i, i);
    if (!inserted) it->second.second = i;
  }
  std::int64_t t0 = 0;
  for (std::int64_t i = 0; i <= hf; ++i) {
    auto [it, inserted] = seen.try_emplace(forward[i], i, i);
    if (!inserted) {
      if (it->second.first <= 0) t0 = i;
      it->second.second = i;
    }
  }
  // cover[t + hb] > 0 iff some site is seen both before and after t.
  std::vector<std::int32_t> cover(static_cast<std::size_t>(hb + hf + 2), 0);
  for (const auto& [site, fl] : seen) {
    if (fl.second - fl.first < 2) continue;
    ++cover[fl.first + 1 + hb];
    --cover[fl.second + hb];
  }
  CutTimeSample out;
  out.times.push_back(t0);
  std::int64_t running = 0;
  for (std::int64_t t = -hb; t <= hf && out.times.size() <= n; ++t) {
    running += cover[t + hb];
    if (t > t0 && running == 0) out.times.push_back(t);
  }
  out.censored = out.times.size() <= n || out.times.back() > hf / 2;
  return out;
}

LerwCountSample lerw_counts(std::span<const SiteKey> forward, unsigned n) {
  LoopEraser<SiteKey, SiteKeyHash> eraser;
  std::vector<std::uint64_t> histogram(n + 2, 0);
  for (const SiteKey s : forward) {
    eraser.push(s);
    ++histogram[std::min<std::size_t>(eraser.length(), n + 1)];
  }
  LerwCountSample out;
  out.final_length = eraser.length();
  out.counts.resize(n + 1);
  out.censored.resize(n + 1);
  std::uint64_t acc = 0;
  for (unsigned level = 0; level <= n; ++level) {
    acc += histogram[level];
    out.counts[level] = acc;
    out.censored[level] = out.final_length <= level ? 1 : 0;
  }
  return out;
}

TwoSidedWalkStats sample_cut_and_lerw(int dimension, unsigned n_max, std::uint64_t horizon,
                                      RngStream& rng) {
  require_cut_dimension(dimension);
  const SiteCodec codec(dimension);
  const auto backward = lattice_walk(codec, horizon, rng);
  const auto forward = lattice_walk(codec, horizon, rng);
  return {cut_times_two_sided(backward, forward, n_max), lerw_counts(forward, n_max)};
}

CutTimeSample cut_time_T_n(int dimension, unsigned n, std::uint64_t horizon, RngStream& rng) {
  require_cut_dimension(dimension);
  const SiteCodec codec(dimension);
  const auto backward = lattice_walk(codec, horizon, rng);
  const auto forward = lattice_walk(codec, horizon, rng);
  return cut_times_two_sided(backward, forward, n);
}

LerwCountSample lerw_length_counter_L_n(int dimension, unsigned n, std::uint64_t horizon,
                                        RngStream& rng) {
  require_cut_dimension(dimension);
  const SiteCodec codec(dimension);
  return lerw_counts(lattice_walk(codec, horizon, rng), n);
}

}  // namespace forestlab
