#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "pprisk/error.hpp"

namespace pprisk::streamtemp {

struct Autocorrelation {
  std::vector<double> r;  // r[0] == 1, r[k] for k = 1..max_lag
  double band = 0.0;      // 5% two-sided significance half-width, 1.96/sqrt(n)

  bool significant(std::size_t lag) const { return std::abs(r[lag]) > band; }
};

/// Sample autocorrelation, mean-centered, biased (1/n) denominator.
inline Autocorrelation acf(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (n <= max_lag + 1)
    throw Error(ErrorCode::InsufficientData, "streamtemp", "series too short for requested lag");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (double v : x) denom += (v - mean) * (v - mean);
  if (!(denom > 0)) throw Error(ErrorCode::ZeroVariance, "streamtemp", "constant series has no autocorrelation");

  Autocorrelation out;
  out.r.resize(max_lag + 1);
  out.r[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) s += (x[t] - mean) * (x[t + k] - mean);
    out.r[k] = s / denom;
  }
  out.band = 1.96 / std::sqrt(static_cast<double>(n));
  return out;
}

/// Mean and sample standard deviation fitted on a training window.
struct Standardizer {
  double mean = 0.0;
  double scale = 1.0;

  static Standardizer fit(std::span<const double> x) {
    if (x.size() < 2) throw Error(ErrorCode::InsufficientData, "streamtemp", "standardization needs 2 values");
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    double sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
    if (!(sd > 0)) throw Error(ErrorCode::ZeroVariance, "streamtemp", "cannot standardize a constant series");
    return {m, sd};
  }

  double apply(double v) const { return (v - mean) / scale; }
  double invert(double z) const { return z * scale + mean; }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = apply(x[i]);
    return out;
  }
};

struct StandardizedSeries {
  std::vector<double> values;
  Standardizer stats;
};

inline StandardizedSeries standardize(std::span<const double> x) {
  auto s = Standardizer::fit(x);
  return {s.apply(x), s};
}

}  // namespace pprisk::streamtemp
