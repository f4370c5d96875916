#pragma once

#include <cmath>
#include <string>

#include "pprisk/calendar.hpp"
#include "pprisk/error.hpp"
#include "pprisk/geogrid.hpp"

namespace pprisk::watersupply {

// 1 mm of water over 1 km² is 1000 m³; 1 m³ = 264.172 US gal.
inline constexpr double kGallonsPerCubicMeter = 264.172;
inline constexpr double kMgalPerMmKm2 = 1000.0 * kGallonsPerCubicMeter * 1e-6;
inline constexpr double kDefaultPerCapitaM3 = 1700.0;
// Severe-dry class boundary (inclusive).
inline constexpr double kSignificantDryMgal = -3'000'000.0;

enum class DemandMode {
  Absolute,  // per-capita use x projected population
  Change,    // per-capita use x (projected - 2010 population)
};

struct WaaciRecord {
  std::string fips;
  WindowLabel window = WindowLabel::W2010s;
  std::string scenario;
  std::string statistic;  // ensemble statistic tag or member id
  double supply_mgal = 0.0;
  double demand_mgal = 0.0;
  double waaci_mgal = 0.0;

  bool stressed() const { return waaci_mgal < 0; }
};

/// Elementwise P - E on identical grids, axes and provenance.
inline geogrid::GriddedField freshwater(const geogrid::GriddedField& precip,
                                        const geogrid::GriddedField& evap) {
  if (!(precip.spec == evap.spec) || precip.times != evap.times ||
      precip.provenance != evap.provenance || precip.values.size() != evap.values.size())
    throw Error(ErrorCode::Alignment, "watersupply",
                "precipitation and evapotranspiration fields are not aligned (" +
                    precip.provenance.member_id() + " vs " + evap.provenance.member_id() + ")");
  geogrid::GriddedField out = precip;
  out.units = "mm/month";
  for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = precip.values[k] - evap.values[k];
  return out;
}

/// Mean annual depth (mm/year) over the window: window total / years.
inline double climatology(const MonthlySeries& series, const ClimatologyWindow& window) {
  int first = window.first_month_index(), end = window.end_month_index();
  if (!series.covers(first) || !series.covers(end - 1))
    throw Error(ErrorCode::Coverage, "watersupply",
                "series does not cover window " + std::string(to_string(window.label)));
  double total = 0.0;
  for (int m = first; m < end; ++m) {
    double v = series.at_index(m);
    if (!std::isfinite(v))
      throw Error(ErrorCode::Coverage, "watersupply",
                  "missing month in window " + std::string(to_string(window.label)));
    total += v;
  }
  return total / window.years();
}

/// Depth (mm/year) over area (km²) to Mgal/year.
inline double to_volume(double depth_mm, double area_km2) {
  if (area_km2 < 0) throw Error(ErrorCode::Validation, "watersupply", "negative area");
  return depth_mm * area_km2 * kMgalPerMmKm2;
}

/// Municipal demand in Mgal/year.
inline double municipal_demand(double population, double per_capita_m3 = kDefaultPerCapitaM3) {
  if (population < 0) throw Error(ErrorCode::Validation, "watersupply", "negative population");
  return population * per_capita_m3 * kGallonsPerCubicMeter * 1e-6;
}

/// Demand under either reading of the population term. For Change mode the
/// (possibly negative) population change is used, so demand may be negative.
inline double demand_for(double projected, double pop2010, DemandMode mode,
                         double per_capita_m3 = kDefaultPerCapitaM3) {
  if (mode == DemandMode::Absolute) return municipal_demand(projected, per_capita_m3);
  if (projected < 0 || pop2010 < 0) throw Error(ErrorCode::Validation, "watersupply", "negative population");
  return (projected - pop2010) * per_capita_m3 * kGallonsPerCubicMeter * 1e-6;
}

inline double waaci(double supply_mgal, double demand_mgal) { return supply_mgal - demand_mgal; }

inline bool is_significant_dry(double waaci_mgal) { return waaci_mgal <= kSignificantDryMgal; }

/// Window value minus its 2010s baseline for the same county and statistic.
inline double waaci_change(const WaaciRecord& window_value, const WaaciRecord& baseline) {
  if (window_value.fips != baseline.fips || window_value.statistic != baseline.statistic ||
      window_value.scenario != baseline.scenario)
    throw Error(ErrorCode::Alignment, "watersupply", "change requires matching county and provenance");
  return window_value.waaci_mgal - baseline.waaci_mgal;
}

inline double waaci_change(double window_value, double baseline_value) { return window_value - baseline_value; }

}  // namespace pprisk::watersupply
