#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "pprisk/calendar.hpp"
#include "pprisk/error.hpp"

namespace pprisk::geogrid {

inline constexpr double kEarthRadiusKm = 6371.0;
// Axis positions closer than this to a node snap onto it.
inline constexpr double kSnap = 1e-9;

enum class Variable { Precipitation, Evapotranspiration, AirTemperature, LongwaveClearSky, ShortwaveClearSky };

inline std::string_view to_string(Variable v) {
  switch (v) {
    case Variable::Precipitation: return "precipitation";
    case Variable::Evapotranspiration: return "evapotranspiration";
    case Variable::AirTemperature: return "air_temperature";
    case Variable::LongwaveClearSky: return "rldscs";
    case Variable::ShortwaveClearSky: return "rsdscs";
  }
  return "?";
}

inline std::optional<Variable> parse_variable(std::string_view s) {
  for (auto v : {Variable::Precipitation, Variable::Evapotranspiration, Variable::AirTemperature,
                 Variable::LongwaveClearSky, Variable::ShortwaveClearSky})
    if (to_string(v) == s) return v;
  if (s == "pr") return Variable::Precipitation;
  if (s == "evspsbl" || s == "et") return Variable::Evapotranspiration;
  if (s == "tas") return Variable::AirTemperature;
  return std::nullopt;
}

inline std::string_view default_units(Variable v) {
  switch (v) {
    case Variable::Precipitation:
    case Variable::Evapotranspiration: return "mm/month";
    case Variable::AirTemperature: return "degC";
    case Variable::LongwaveClearSky:
    case Variable::ShortwaveClearSky: return "W/m2";
  }
  return "";
}

/// (model, scenario, initial-condition run) identity of an ensemble member.
struct Provenance {
  std::string model;
  std::string scenario;
  std::string run;

  std::string member_id() const { return model + ":" + run; }
  friend auto operator<=>(const Provenance&, const Provenance&) = default;
};

/// Maps any longitude onto [-180, 180).
inline double normalize_longitude(double lon) {
  double x = std::fmod(lon + 180.0, 360.0);
  if (x < 0) x += 360.0;
  return x - 180.0;
}

struct GridSpec {
  double lat_start = 0.0;
  double lat_step = 1.0;
  int lat_count = 2;
  double lon_start = 0.0;
  double lon_step = 1.0;
  int lon_count = 2;

  double lat(int i) const { return lat_start + i * lat_step; }
  double lon(int j) const { return lon_start + j * lon_step; }
  double lat_end() const { return lat(lat_count - 1); }
  double lon_end() const { return lon(lon_count - 1); }
  std::size_t nodes() const { return static_cast<std::size_t>(lat_count) * lon_count; }

  bool contains(double la, double lo) const {
    return la >= lat_start - kSnap && la <= lat_end() + kSnap && lo >= lon_start - kSnap &&
           lo <= lon_end() + kSnap;
  }
  bool contains(const GridSpec& other) const {
    return contains(other.lat_start, other.lon_start) && contains(other.lat_end(), other.lon_end());
  }

  void validate() const {
    if (!(lat_step > 0) || !(lon_step > 0))
      throw Error(ErrorCode::Validation, "geogrid", "grid steps must be positive");
    if (lat_count < 2 || lon_count < 2)
      throw Error(ErrorCode::Validation, "geogrid", "grid needs at least 2 nodes per axis");
    if (lat_start < -90.0 || lat_end() > 90.0)
      throw Error(ErrorCode::Validation, "geogrid", "latitudes outside [-90, 90]");
    if (lon_start < -180.0 || lon_end() >= 180.0)
      throw Error(ErrorCode::Validation, "geogrid", "longitudes outside [-180, 180)");
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// One variable on a regular grid. Values are laid out [time][lat][lon].
struct GriddedField {
  GridSpec spec;
  Variable variable = Variable::Precipitation;
  std::string units;
  std::vector<YearMonth> times;  // contiguous, ascending
  std::vector<double> values;
  Provenance provenance;

  std::size_t time_count() const { return times.size(); }
  std::size_t offset(std::size_t t, int i, int j) const {
    return (t * spec.lat_count + i) * spec.lon_count + j;
  }
  double at(std::size_t t, int i, int j) const { return values[offset(t, i, j)]; }
  double& at(std::size_t t, int i, int j) { return values[offset(t, i, j)]; }

  void validate() const {
    spec.validate();
    if (values.size() != times.size() * spec.nodes())
      throw Error(ErrorCode::Shape, "geogrid", "value count does not match time x lat x lon");
    for (std::size_t t = 1; t < times.size(); ++t)
      if (times[t].index() != times[t - 1].index() + 1)
        throw Error(ErrorCode::Coverage, "geogrid", "time axis is not contiguous monthly");
    for (double v : values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::Validation, "geogrid", "non-finite grid value");
      if (variable == Variable::Precipitation && v < 0)
        throw Error(ErrorCode::Validation, "geogrid", "negative precipitation");
    }
  }
};

namespace detail {

struct AxisPos {
  int lo;
  double frac;
};

inline AxisPos locate(double x, double start, double step, int count, const char* axis) {
  double f = (x - start) / step;
  double r = std::round(f);
  if (std::abs(f - r) < kSnap) f = r;
  if (f < 0.0 || f > count - 1)
    throw Error(ErrorCode::DomainCoverage, "geogrid",
                std::string(axis) + " " + std::to_string(x) + " outside grid domain");
  int lo = std::min(static_cast<int>(std::floor(f)), count - 2);
  return {lo, f - lo};
}

struct Stencil {
  std::size_t i0, j0;
  double t, u;
};

inline Stencil stencil(const GridSpec& spec, double lat, double lon) {
  auto a = locate(lat, spec.lat_start, spec.lat_step, spec.lat_count, "latitude");
  auto b = locate(normalize_longitude(lon), spec.lon_start, spec.lon_step, spec.lon_count, "longitude");
  return {static_cast<std::size_t>(a.lo), static_cast<std::size_t>(b.lo), a.frac, b.frac};
}

inline double blend(const GriddedField& f, std::size_t t, const Stencil& s) {
  int i = static_cast<int>(s.i0), j = static_cast<int>(s.j0);
  double v00 = f.at(t, i, j), v01 = f.at(t, i, j + 1);
  double v10 = f.at(t, i + 1, j), v11 = f.at(t, i + 1, j + 1);
  return (1 - s.t) * (1 - s.u) * v00 + (1 - s.t) * s.u * v01 + s.t * (1 - s.u) * v10 + s.t * s.u * v11;
}

}  // namespace detail

/// Bilinear value of `field` at (lat, lon) for every time step.
inline std::vector<double> sample_at_point(const GriddedField& field, double lat, double lon) {
  auto s = detail::stencil(field.spec, lat, lon);
  std::vector<double> out(field.time_count());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = detail::blend(field, t, s);
  return out;
}

/// Same as sample_at_point, packaged on the field's monthly axis.
inline MonthlySeries series_at_point(const GriddedField& field, double lat, double lon) {
  MonthlySeries s;
  s.start = field.times.empty() ? YearMonth{} : field.times.front();
  s.values = sample_at_point(field, lat, lon);
  return s;
}

/// Interpolates onto `target`; every target node must lie inside the source hull.
inline GriddedField regrid_bilinear(const GriddedField& field, const GridSpec& target) {
  target.validate();
  if (!field.spec.contains(target))
    throw Error(ErrorCode::DomainCoverage, "geogrid", "target grid extends outside source domain");
  GriddedField out;
  out.spec = target;
  out.variable = field.variable;
  out.units = field.units;
  out.times = field.times;
  out.provenance = field.provenance;
  out.values.resize(field.time_count() * target.nodes());
  std::vector<detail::Stencil> stencils;
  stencils.reserve(target.nodes());
  for (int i = 0; i < target.lat_count; ++i)
    for (int j = 0; j < target.lon_count; ++j)
      stencils.push_back(detail::stencil(field.spec, target.lat(i), target.lon(j)));
  for (std::size_t t = 0; t < field.time_count(); ++t)
    for (std::size_t n = 0; n < stencils.size(); ++n)
      out.values[t * target.nodes() + n] = detail::blend(field, t, stencils[n]);
  return out;
}

/// Area in km² of the lat/lon cell centered at lat_center (degrees).
inline double cell_area(double lat_center, double dlat, double dlon) {
  double south = lat_center - dlat / 2, north = lat_center + dlat / 2;
  if (south < -90.0 - kSnap || north > 90.0 + kSnap)
    throw Error(ErrorCode::Validation, "geogrid", "cell extends beyond the poles");
  constexpr double deg = std::numbers::pi / 180.0;
  south = std::max(south, -90.0);
  north = std::min(north, 90.0);
  return kEarthRadiusKm * kEarthRadiusKm * (dlon * deg) * (std::sin(north * deg) - std::sin(south * deg));
}

/// Great-circle distance in km.
inline double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double deg = std::numbers::pi / 180.0;
  double dphi = (lat2 - lat1) * deg, dlam = (lon2 - lon1) * deg;
  double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
             std::cos(lat1 * deg) * std::cos(lat2 * deg) * std::sin(dlam / 2) * std::sin(dlam / 2);
  return 2 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

}  // namespace pprisk::geogrid
