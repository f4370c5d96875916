#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pprisk/error.hpp"

namespace pprisk::ensemble {

enum class Scenario { Rcp26, Rcp85 };

inline std::string_view to_string(Scenario s) { return s == Scenario::Rcp26 ? "rcp26" : "rcp85"; }

inline std::optional<Scenario> parse_scenario(std::string_view s) {
  if (s == "rcp26" || s == "RCP2.6" || s == "rcp2.6") return Scenario::Rcp26;
  if (s == "rcp85" || s == "RCP8.5" || s == "rcp8.5") return Scenario::Rcp85;
  return std::nullopt;
}

struct Member {
  std::string model;
  std::string run;
  friend auto operator<=>(const Member&, const Member&) = default;
};

struct EnsembleSpec {
  Scenario scenario = Scenario::Rcp85;
  std::vector<Member> members;

  void validate() const {
    if (members.empty()) throw Error(ErrorCode::EmptyEnsemble, "ensemble", "ensemble has no members");
    auto sorted = members;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(ErrorCode::Validation, "ensemble", "duplicate ensemble member");
  }
};

/// Statistic selector; CLI spellings are median | min2 | p80.
enum class Statistic { Median, Min2, P80 };

inline std::string_view to_string(Statistic s) {
  switch (s) {
    case Statistic::Median: return "median";
    case Statistic::Min2: return "min2";
    case Statistic::P80: return "p80";
  }
  return "?";
}

inline std::optional<Statistic> parse_statistic(std::string_view s) {
  for (auto st : {Statistic::Median, Statistic::Min2, Statistic::P80})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

namespace detail {
inline void require_values(std::span<const double> v) {
  if (v.empty()) throw Error(ErrorCode::EmptyEnsemble, "ensemble", "no ensemble values");
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorCode::Validation, "ensemble", "non-finite ensemble value");
}
}  // namespace detail

inline double mme_median(std::span<const double> values) {
  detail::require_values(values);
  std::vector<double> v(values.begin(), values.end());
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

/// k-th smallest value, k is 1-based.
inline double mme_kth_min(std::span<const double> values, std::size_t k) {
  detail::require_values(values);
  if (k < 1 || k > values.size())
    throw Error(ErrorCode::Rank, "ensemble",
                "rank " + std::to_string(k) + " outside 1.." + std::to_string(values.size()));
  std::vector<double> v(values.begin(), values.end());
  std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
  return v[k - 1];
}

/// Nearest-rank index ceil(p/100 * n), 1-based.
inline std::size_t nearest_rank(double p, std::size_t n) {
  if (!(p > 0 && p <= 100)) throw Error(ErrorCode::Rank, "ensemble", "percentile must be in (0, 100]");
  double r = p * static_cast<double>(n) / 100.0;
  double nearest = std::round(r);
  if (std::abs(r - nearest) < 1e-9) r = nearest;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(r)));
}

inline double mme_percentile(std::span<const double> values, double p) {
  detail::require_values(values);
  return mme_kth_min(values, nearest_rank(p, values.size()));
}

inline double reduce(Statistic stat, std::span<const double> values) {
  switch (stat) {
    case Statistic::Median: return mme_median(values);
    case Statistic::Min2: return mme_kth_min(values, std::min<std::size_t>(2, values.size()));
    case Statistic::P80: return mme_percentile(values, 80.0);
  }
  return mme_median(values);
}

}  // namespace pprisk::ensemble
