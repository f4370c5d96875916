#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "pprisk/error.hpp"

namespace pprisk::streamtemp {

enum class TrendDirection { Up, Down, None };

inline std::string_view to_string(TrendDirection d) {
  switch (d) {
    case TrendDirection::Up: return "up";
    case TrendDirection::Down: return "down";
    case TrendDirection::None: return "none";
  }
  return "none";
}

struct TrendResult {
  double s = 0.0;
  double var_ties = 0.0;       // no-autocorrelation variance with tie groups removed
  double var_corrected = 0.0;  // var_ties inflated by the effective-sample-size factor
  double correction = 1.0;     // n / n* (>= 1)
  double z = 0.0;
  double p = 1.0;
  TrendDirection direction = TrendDirection::None;
  bool significant = false;

  /// Two-sided p of the same S with the uncorrected (ties-only) variance.
  double p_uncorrected() const;
};

namespace detail {

inline double sgn(double v) { return (v > 0) - (v < 0); }

inline double continuity_z(double s, double var) {
  if (s == 0 || !(var > 0)) return 0.0;
  return (s - sgn(s)) / std::sqrt(var);
}

inline double two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

/// Average ranks (1-based), ties share the mean rank.
inline std::vector<double> ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

/// Median of pairwise slopes; only used to detrend before ranking.
inline double median_pairwise_slope(std::span<const double> x) {
  std::vector<double> slopes;
  slopes.reserve(x.size() * (x.size() - 1) / 2);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      slopes.push_back((x[j] - x[i]) / static_cast<double>(j - i));
  std::size_t mid = slopes.size() / 2;
  std::nth_element(slopes.begin(), slopes.begin() + mid, slopes.end());
  double upper = slopes[mid];
  if (slopes.size() % 2 == 1) return upper;
  return 0.5 * (upper + *std::max_element(slopes.begin(), slopes.begin() + mid));
}

/// n/n* from autocorrelations of the detrended ranks. Only lags whose
/// autocorrelation leaves the 5% band contribute, up to lag n/4; the
/// factor never deflates the variance.
inline double effective_size_factor(std::span<const double> x) {
  const std::size_t n = x.size();
  double slope = median_pairwise_slope(x);
  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i) resid[i] = x[i] - slope * static_cast<double>(i);
  auto r = ranks(resid);
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (double v : r) denom += (v - mean) * (v - mean);
  if (!(denom > 0)) return 1.0;

  const double band = 1.96 / std::sqrt(static_cast<double>(n));
  const double nn = static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t k = 1; k <= n / 4; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) s += (r[t] - mean) * (r[t + k] - mean);
    double rho = s / denom;
    if (std::abs(rho) <= band) continue;
    double kk = static_cast<double>(k);
    acc += (nn - kk) * (nn - kk - 1) * (nn - kk - 2) * rho;
  }
  double factor = 1.0 + 2.0 * acc / (nn * (nn - 1) * (nn - 2));
  return std::max(1.0, factor);
}

}  // namespace detail

inline double TrendResult::p_uncorrected() const { return detail::two_sided_p(detail::continuity_z(s, var_ties)); }

/// Mann-Kendall test with tie and autocorrelation (Hamed-Rao) corrections.
/// The series must be complete; impute gaps first.
inline TrendResult mk_trend(std::span<const double> x, double alpha = 0.10) {
  const std::size_t n = x.size();
  if (n < 3) throw Error(ErrorCode::InsufficientData, "streamtemp", "trend test needs at least 3 values");
  for (double v : x)
    if (!std::isfinite(v)) throw Error(ErrorCode::Validation, "streamtemp", "series has gaps; impute first");

  TrendResult out;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.s += detail::sgn(x[j] - x[i]);

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    double t = static_cast<double>(j - i + 1);
    tie_term += t * (t - 1) * (2 * t + 5);
    i = j + 1;
  }
  const double nn = static_cast<double>(n);
  out.var_ties = (nn * (nn - 1) * (2 * nn + 5) - tie_term) / 18.0;
  if (out.var_ties <= 0 || out.s == 0) {
    out.var_corrected = out.var_ties;
    return out;  // all equal, or no net direction
  }

  out.correction = detail::effective_size_factor(x);
  out.var_corrected = out.var_ties * out.correction;
  out.z = detail::continuity_z(out.s, out.var_corrected);
  out.p = detail::two_sided_p(out.z);
  out.direction = out.s > 0 ? TrendDirection::Up : TrendDirection::Down;
  out.significant = out.p < alpha;
  return out;
}

}  // namespace pprisk::streamtemp
