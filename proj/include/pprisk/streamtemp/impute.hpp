#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pprisk/error.hpp"

namespace pprisk::streamtemp {

/// Fills gaps so that the discrete second difference vanishes at every
/// equation touching an unknown while known samples stay fixed. In one
/// dimension that system's solution is closed-form: straight lines between
/// bracketing knowns, and the line through the two outermost knowns at
/// each end.
inline std::vector<double> impute(std::span<const std::optional<double>> series) {
  std::vector<std::size_t> known;
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series[i]) known.push_back(i);
  if (known.size() < 2)
    throw Error(ErrorCode::InsufficientData, "streamtemp", "imputation needs at least 2 known values");

  std::vector<double> out(series.size());
  for (std::size_t i : known) out[i] = *series[i];

  auto line = [&](std::size_t a, std::size_t b, std::size_t i) {
    double ya = out[a], yb = out[b];
    double t = (static_cast<double>(i) - static_cast<double>(a)) / static_cast<double>(b - a);
    return ya + t * (yb - ya);
  };

  for (std::size_t i = 0; i < known.front(); ++i) out[i] = line(known[0], known[1], i);
  for (std::size_t k = 0; k + 1 < known.size(); ++k)
    for (std::size_t i = known[k] + 1; i < known[k + 1]; ++i) out[i] = line(known[k], known[k + 1], i);
  std::size_t m = known.size();
  for (std::size_t i = known.back() + 1; i < series.size(); ++i) out[i] = line(known[m - 2], known[m - 1], i);
  return out;
}

}  // namespace pprisk::streamtemp
