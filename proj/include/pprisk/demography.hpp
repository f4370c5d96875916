#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>

#include "pprisk/error.hpp"

namespace pprisk::demography {

inline constexpr int kBaseYear = 2010;

struct CountyRecord {
  std::string fips;  // 5 digits
  std::string name;  // optional display name
  std::string state;
  double lat = 0.0;
  double lon = 0.0;
  double area_km2 = 0.0;
  double pop2000 = 0.0;
  double pop2010 = 0.0;
  double growth_rate = 0.0;        // fraction / year
  bool rate_undefined = false;     // pop2000 missing or zero; rate forced to 0
  std::map<int, double> projections;  // target year -> persons

  std::string label() const { return name.empty() ? fips : name; }
};

/// Geometric mean annual growth rate over the 2000-2010 decade.
inline double growth_rate(double pop2000, double pop2010) {
  if (!(pop2000 > 0))
    throw Error(ErrorCode::UndefinedRate, "demography", "growth rate undefined for zero base population");
  if (pop2010 < 0) throw Error(ErrorCode::Validation, "demography", "negative population");
  return std::pow(pop2010 / pop2000, 0.1) - 1.0;
}

/// Compound projection pop2010 * (1 + rate)^years. No rounding.
inline double project_population(double pop2010, double rate, int years) {
  if (1.0 + rate < 0)
    throw Error(ErrorCode::InvalidRate, "demography", "growth rate below -100%/year");
  if (years < 0) throw Error(ErrorCode::Validation, "demography", "negative projection horizon");
  if (pop2010 < 0) throw Error(ErrorCode::Validation, "demography", "negative population");
  return pop2010 * std::pow(1.0 + rate, years);
}

/// Fills growth_rate (falling back to 0 with a flag) and projections to
/// each target year.
inline void prepare_county(CountyRecord& c, std::span<const int> target_years) {
  if (c.pop2000 > 0) {
    c.growth_rate = growth_rate(c.pop2000, c.pop2010);
    c.rate_undefined = false;
  } else {
    c.growth_rate = 0.0;
    c.rate_undefined = true;
  }
  for (int y : target_years) c.projections[y] = project_population(c.pop2010, c.growth_rate, y - kBaseYear);
}

/// Population at `year` (>= 2010), from the stored projection if present.
inline double population_at(const CountyRecord& c, int year) {
  if (auto it = c.projections.find(year); it != c.projections.end()) return it->second;
  if (year == kBaseYear) return c.pop2010;
  return project_population(c.pop2010, c.growth_rate, year - kBaseYear);
}

/// Percent difference between the county total and a national reference.
inline double national_check(std::span<const double> county_projections, double national_reference) {
  if (!(national_reference > 0))
    throw Error(ErrorCode::InvalidReference, "demography", "national reference must be positive");
  double total = 0.0;
  for (double p : county_projections) total += p;
  return 100.0 * std::abs(total - national_reference) / national_reference;
}

}  // namespace pprisk::demography
