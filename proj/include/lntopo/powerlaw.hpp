#pragma once

// Discrete power-law fitting: maximum-likelihood exponent, KS-based tail
// cutoff selection and a semi-parametric bootstrap goodness-of-fit test.
//
// Model: P(k) = k^(-gamma) / ζ(gamma, k_min) for integers k ≥ k_min.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lntopo/error.hpp"
#include "lntopo/parallel.hpp"
#include "lntopo/random.hpp"
#include "lntopo/zeta.hpp"

namespace lntopo::powerlaw {

struct MleResult {
  double gamma = 0.0;
  double log_likelihood = 0.0;
};

struct PowerLawFit {
  double gamma = 0.0;           // positive; P(k) ∝ k^(-gamma)
  std::int64_t k_min = 1;
  std::size_t n_tail = 0;       // observations ≥ k_min
  double ks_statistic = 0.0;
  double log_likelihood = 0.0;
  bool low_confidence = false;  // fewer than 10 distinct values observed
};

struct GofResult {
  double p_value = 0.0;
  std::size_t bootstrap_count = 0;
  double precision = 0.0;  // 1 / (2 sqrt(bootstrap_count))
};

/// Distinct sample values (ascending) with multiplicities.
class Histogram {
 public:
  Histogram() = default;

  explicit Histogram(std::span<const std::int64_t> samples) {
    std::vector<std::int64_t> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty() && sorted.front() < 1) {
      throw DomainError("power-law samples must be positive integers");
    }
    for (const auto x : sorted) {
      if (!values_.empty() && values_.back() == x) {
        ++counts_.back();
      } else {
        values_.push_back(x);
        counts_.push_back(1);
      }
    }
    suffix_count_.assign(values_.size() + 1, 0);
    suffix_log_.assign(values_.size() + 1, 0.0);
    for (std::size_t i = values_.size(); i-- > 0;) {
      suffix_count_[i] = suffix_count_[i + 1] + counts_[i];
      suffix_log_[i] = suffix_log_[i + 1] + static_cast<double>(counts_[i]) * std::log(static_cast<double>(values_[i]));
    }
  }

  std::size_t distinct() const noexcept { return values_.size(); }
  std::size_t total() const noexcept { return suffix_count_.empty() ? 0 : suffix_count_[0]; }
  std::int64_t value(std::size_t i) const { return values_[i]; }
  std::size_t count(std::size_t i) const { return counts_[i]; }
  // Observations with value ≥ value(i), and the sum of their logarithms.
  std::size_t tail_count(std::size_t i) const { return suffix_count_[i]; }
  double tail_log_sum(std::size_t i) const { return suffix_log_[i]; }

  // Index of the first distinct value ≥ k_min.
  std::size_t lower_index(std::int64_t k_min) const {
    return static_cast<std::size_t>(std::lower_bound(values_.begin(), values_.end(), k_min) - values_.begin());
  }

 private:
  std::vector<std::int64_t> values_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> suffix_count_;
  std::vector<double> suffix_log_;
};

namespace detail {

inline double log_likelihood(double gamma, std::int64_t k_min, double n_tail, double log_sum) {
  return -n_tail * std::log(hurwitz_zeta(gamma, static_cast<double>(k_min))) - gamma * log_sum;
}

// Golden-section maximisation of the (concave) log-likelihood in gamma.
inline MleResult maximize_likelihood(std::int64_t k_min, std::size_t n_tail, double log_sum) {
  const double n = static_cast<double>(n_tail);
  auto ll = [&](double g) { return log_likelihood(g, k_min, n, log_sum); };

  constexpr double kLow = 1.0 + 1e-9;
  double hi = 4.0;
  while (ll(hi) > ll(hi * 0.999)) {
    hi *= 2.0;
    if (hi > 4096.0) throw DomainError("power-law exponent diverges (degenerate tail)");
  }

  constexpr double kInvPhi = 0.6180339887498949;
  double a = kLow, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = ll(c), fd = ll(d);
  while (b - a > 1e-9) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = ll(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = ll(d);
    }
  }
  const double gamma = 0.5 * (a + b);
  return {gamma, ll(gamma)};
}

// Largest gap between consecutive support points bridged by explicit
// subtraction of terms rather than a fresh zeta evaluation.
inline constexpr std::int64_t kDirectGap = 64;

// KS distance between the tail starting at distinct index `start` and the
// fitted model. Both CDFs are evaluated as left limits P(X < x) at each
// observed value x of the tail.
inline double ks_on_tail(const Histogram& h, std::size_t start, double gamma) {
  const std::int64_t k_min = h.value(start);
  const double n_tail = static_cast<double>(h.tail_count(start));
  const double z_min = hurwitz_zeta(gamma, static_cast<double>(k_min));

  double z = z_min;  // ζ(gamma, current value)
  std::int64_t at = k_min;
  std::size_t below = 0;
  double distance = 0.0;
  for (std::size_t i = start; i < h.distinct(); ++i) {
    const std::int64_t x = h.value(i);
    if (x - at <= kDirectGap) {
      for (; at < x; ++at) z -= std::pow(static_cast<double>(at), -gamma);
    } else {
      z = hurwitz_zeta(gamma, static_cast<double>(x));
      at = x;
    }
    const double model = 1.0 - z / z_min;
    const double empirical = static_cast<double>(below) / n_tail;
    distance = std::max(distance, std::abs(empirical - model));
    below += h.count(i);
  }
  return distance;
}

inline void require_tail(const Histogram& h, std::size_t start, std::int64_t k_min) {
  if (start >= h.distinct() || h.tail_count(start) < 2) {
    throw DomainError("fewer than 2 samples at or above k_min");
  }
  if (start + 1 == h.distinct() && h.value(start) == k_min) {
    throw DomainError("all tail samples equal k_min; exponent diverges");
  }
}

// Largest standard error (gamma - 1) / sqrt(n_tail) a k_min candidate may
// have. The scan over ascending k_min stops at the first candidate above it.
inline constexpr double kMaxGammaError = 0.1;

inline PowerLawFit select_kmin(const Histogram& h) {
  if (h.distinct() < 2) throw DomainError("power-law fit needs at least 2 distinct values");
  PowerLawFit best;
  best.ks_statistic = std::numeric_limits<double>::infinity();
  for (std::size_t start = 0; start + 1 < h.distinct(); ++start) {
    const std::size_t n_tail = h.tail_count(start);
    const auto mle = maximize_likelihood(h.value(start), n_tail, h.tail_log_sum(start));
    if (start > 0 && (mle.gamma - 1.0) / std::sqrt(static_cast<double>(n_tail)) > kMaxGammaError) break;
    const double ks = ks_on_tail(h, start, mle.gamma);
    if (ks < best.ks_statistic) {
      best.gamma = mle.gamma;
      best.k_min = h.value(start);
      best.n_tail = n_tail;
      best.ks_statistic = ks;
      best.log_likelihood = mle.log_likelihood;
    }
  }
  best.low_confidence = h.distinct() < 10;
  return best;
}

}  // namespace detail

/// Maximum-likelihood exponent for the samples ≥ k_min.
inline MleResult mle_gamma(std::span<const std::int64_t> samples, std::int64_t k_min) {
  if (k_min < 1) throw DomainError("k_min must be at least 1");
  const Histogram h(samples);
  const std::size_t start = h.lower_index(k_min);
  detail::require_tail(h, start, k_min);
  return detail::maximize_likelihood(k_min, h.tail_count(start), h.tail_log_sum(start));
}

/// Sup distance between the empirical and model CDFs over the observed
/// tail support (left-limit convention, see detail::ks_on_tail).
inline double ks_distance(std::span<const std::int64_t> samples, double gamma, std::int64_t k_min) {
  if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
  std::vector<std::int64_t> tail;
  for (const auto x : samples) {
    if (x >= k_min) tail.push_back(x);
  }
  if (tail.empty()) throw DomainError("no samples at or above k_min");
  // Evaluate against the requested k_min even if it is unobserved.
  const Histogram h(tail);
  const double n_tail = static_cast<double>(h.total());
  const double z_min = hurwitz_zeta(gamma, static_cast<double>(k_min));
  if (h.value(0) == k_min) return detail::ks_on_tail(h, 0, gamma);

  double distance = 0.0;
  std::size_t below = 0;
  for (std::size_t i = 0; i < h.distinct(); ++i) {
    const double model = 1.0 - hurwitz_zeta(gamma, static_cast<double>(h.value(i))) / z_min;
    distance = std::max(distance, std::abs(static_cast<double>(below) / n_tail - model));
    below += h.count(i);
  }
  return distance;
}

/// Chooses k_min among the observed distinct values by minimising the KS
/// distance of the fitted tail; ties go to the smaller k_min. Candidates
/// whose tail is too small to pin gamma down (detail::kMaxGammaError) are
/// not considered, except the smallest value, which is always a candidate.
inline PowerLawFit select_kmin(std::span<const std::int64_t> samples) {
  return detail::select_kmin(Histogram(samples));
}

/// Inverse-CDF sampler for the discrete power law on [k_min, ∞).
///
/// The complementary CDF ζ(gamma, k) / ζ(gamma, k_min) is tabulated for
/// the first 2^16 support points; deeper draws fall back to exponential
/// plus binary search on direct zeta evaluations.
class DiscretePowerLawSampler {
 public:
  DiscretePowerLawSampler(double gamma, std::int64_t k_min) : gamma_(gamma), k_min_(k_min) {
    if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
    if (k_min < 1) throw DomainError("k_min must be at least 1");
    z_min_ = hurwitz_zeta(gamma, static_cast<double>(k_min));
    constexpr std::size_t kTable = std::size_t{1} << 16;
    ccdf_.resize(kTable + 1);
    // Backward recurrence: adds terms from small to large.
    double z = hurwitz_zeta(gamma, static_cast<double>(k_min) + static_cast<double>(kTable));
    ccdf_[kTable] = z / z_min_;
    for (std::size_t i = kTable; i-- > 0;) {
      z += std::pow(static_cast<double>(k_min) + static_cast<double>(i), -gamma);
      ccdf_[i] = z / z_min_;
    }
    ccdf_[0] = 1.0;
  }

  double gamma() const noexcept { return gamma_; }
  std::int64_t k_min() const noexcept { return k_min_; }

  /// P(K ≥ k).
  double ccdf(std::int64_t k) const {
    if (k <= k_min_) return 1.0;
    const auto offset = static_cast<std::uint64_t>(k - k_min_);
    if (offset < ccdf_.size()) return ccdf_[offset];
    return hurwitz_zeta(gamma_, static_cast<double>(k)) / z_min_;
  }

  std::int64_t operator()(Rng& rng) const { return invert(rng.uniform01_open_low()); }

  /// Draw restricted to [k_min, k_max].
  std::int64_t truncated(Rng& rng, std::int64_t k_max) const {
    const double c = ccdf(k_max + 1);
    return invert(c + (1.0 - c) * rng.uniform01_open_low());
  }

  /// Largest k with P(K ≥ k) ≥ u, for u in (0, 1].
  std::int64_t invert(double u) const {
    if (u > ccdf_.back()) {
      // First table index whose ccdf drops below u.
      const auto it = std::lower_bound(ccdf_.begin(), ccdf_.end(), u,
                                       [](double value, double key) { return value >= key; });
      return k_min_ + static_cast<std::int64_t>(it - ccdf_.begin()) - 1;
    }
    std::int64_t lo = k_min_ + static_cast<std::int64_t>(ccdf_.size()) - 1;  // ccdf(lo) ≥ u
    std::int64_t hi = lo * 2;
    constexpr std::int64_t kCeiling = std::int64_t{1} << 60;
    while (ccdf(hi) >= u) {
      lo = hi;
      if (hi >= kCeiling) return hi;
      hi *= 2;
    }
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      (ccdf(mid) >= u ? lo : hi) = mid;
    }
    return lo;
  }

 private:
  double gamma_;
  std::int64_t k_min_;
  double z_min_ = 1.0;
  std::vector<double> ccdf_;
};

/// Semi-parametric bootstrap p-value of the power-law hypothesis.
///
/// Each replicate draws n values: with probability n_tail/n from the fitted
/// model, otherwise uniformly from the observed values below k_min. The
/// replicate is refitted with k_min reselected; p is the fraction of
/// replicates whose KS distance is at least the observed one. A replicate
/// that cannot be fitted (a single distinct value) counts as a perfect fit.
/// Replicate r uses child_seed(seed, r), so the result does not depend on
/// `threads`.
inline GofResult gof_pvalue(std::span<const std::int64_t> samples, const PowerLawFit& fit,
                            std::size_t bootstrap_count, std::uint64_t seed,
                            unsigned threads = 1) {
  if (bootstrap_count < 100) throw DomainError("bootstrap_count must be at least 100");
  if (samples.empty()) throw DomainError("no samples");

  std::vector<std::int64_t> body;
  for (const auto x : samples) {
    if (x < fit.k_min) body.push_back(x);
  }
  std::sort(body.begin(), body.end());
  const std::size_t n = samples.size();
  const double tail_probability = static_cast<double>(n - body.size()) / static_cast<double>(n);
  const DiscretePowerLawSampler model(fit.gamma, fit.k_min);

  std::vector<std::uint8_t> exceeds(bootstrap_count, 0);
  parallel_for(bootstrap_count, threads, [&](std::size_t r) {
    Rng rng(child_seed(seed, r));
    std::vector<std::int64_t> replicate(n);
    for (auto& x : replicate) {
      if (body.empty() || rng.uniform01() < tail_probability) {
        x = model(rng);
      } else {
        x = body[static_cast<std::size_t>(rng.index(body.size()))];
      }
    }
    const Histogram h(replicate);
    const double ks = h.distinct() < 2 ? 0.0 : detail::select_kmin(h).ks_statistic;
    exceeds[r] = ks >= fit.ks_statistic ? 1 : 0;
  });

  std::size_t hits = 0;
  for (const auto e : exceeds) hits += e;
  GofResult out;
  out.bootstrap_count = bootstrap_count;
  out.p_value = static_cast<double>(hits) / static_cast<double>(bootstrap_count);
  out.precision = 1.0 / (2.0 * std::sqrt(static_cast<double>(bootstrap_count)));
  return out;
}

struct DegreeCcdfRow {
  std::int64_t k = 0;
  std::size_t count = 0;
  double ccdf = 0.0;  // fraction of samples ≥ k
};

inline std::vector<DegreeCcdfRow> degree_ccdf(std::span<const std::int64_t> samples) {
  const Histogram h(samples);
  std::vector<DegreeCcdfRow> rows;
  const double n = static_cast<double>(h.total());
  for (std::size_t i = 0; i < h.distinct(); ++i) {
    rows.push_back({h.value(i), h.count(i), static_cast<double>(h.tail_count(i)) / n});
  }
  return rows;
}

}  // namespace lntopo::powerlaw
