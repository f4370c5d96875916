#pragma once

#include <cmath>
#include <span>

#include "pprisk/error.hpp"

namespace pprisk::streamtemp {

namespace detail {
inline void check_pair(std::span<const double> obs, std::span<const double> pred) {
  if (obs.size() != pred.size()) throw Error(ErrorCode::Shape, "streamtemp", "observed/predicted length mismatch");
  if (obs.size() < 2) throw Error(ErrorCode::InsufficientData, "streamtemp", "metrics need at least 2 pairs");
}
inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}
}  // namespace detail

/// Nash-Sutcliffe efficiency, in (-inf, 1].
inline double nse(std::span<const double> obs, std::span<const double> pred) {
  detail::check_pair(obs, pred);
  double m = detail::mean(obs);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    num += (obs[i] - pred[i]) * (obs[i] - pred[i]);
    den += (obs[i] - m) * (obs[i] - m);
  }
  if (!(den > 0)) throw Error(ErrorCode::ZeroVariance, "streamtemp", "NSE undefined for constant observations");
  return 1.0 - num / den;
}

inline double pearson_r(std::span<const double> obs, std::span<const double> pred) {
  detail::check_pair(obs, pred);
  double mo = detail::mean(obs), mp = detail::mean(pred);
  double sop = 0.0, soo = 0.0, spp = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    double a = obs[i] - mo, b = pred[i] - mp;
    sop += a * b;
    soo += a * a;
    spp += b * b;
  }
  if (!(soo > 0) || !(spp > 0)) throw Error(ErrorCode::ZeroVariance, "streamtemp", "correlation undefined for constant input");
  double r = sop / std::sqrt(soo * spp);
  return std::fmax(-1.0, std::fmin(1.0, r));
}

/// Mean of (predicted - observed).
inline double mean_bias(std::span<const double> obs, std::span<const double> pred) {
  if (obs.size() != pred.size() || obs.empty())
    throw Error(ErrorCode::Shape, "streamtemp", "bias needs equal, non-empty series");
  double s = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) s += pred[i] - obs[i];
  return s / static_cast<double>(obs.size());
}

}  // namespace pprisk::streamtemp
