#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "pprisk/calendar.hpp"
#include "pprisk/error.hpp"
#include "pprisk/geogrid.hpp"
#include "pprisk/thermal.hpp"

namespace pprisk::risk {

inline constexpr double kJoulesPerBtu = 1055.0;
inline constexpr double kJoulesPerMwh = 3.6e9;
inline constexpr double kHoursPerYear = 8760.0;
inline constexpr double kDefaultCapacityFactor = 0.6;
inline constexpr double kDefaultGaugeRadiusKm = 100.0;

enum class Aggregation { Conjunctive, Disjunctive };

inline std::string_view to_string(Aggregation a) { return a == Aggregation::Conjunctive ? "conjunctive" : "disjunctive"; }

inline std::optional<Aggregation> parse_aggregation(std::string_view s) {
  if (s == "conjunctive" || s == "and") return Aggregation::Conjunctive;
  if (s == "disjunctive" || s == "or") return Aggregation::Disjunctive;
  return std::nullopt;
}

struct PlantRecord {
  std::string plant_id;
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
  std::string fips;
  std::string state;
  thermal::Cooling cooling = thermal::Cooling::OnceThrough;
  std::string fuel;
  double nameplate_mw = 0.0;
  std::optional<double> annual_gen_quad;
  std::optional<double> capacity_factor;
  std::optional<double> streamflow_m3s;
  thermal::PlantThermalSpec thermal;  // capacity_w filled from nameplate
  bool t_max_from_inventory = false;  // otherwise the state stream limit applies

  bool wet_cooled() const { return thermal::is_wet(cooling); }
};

struct GaugeSite {
  std::string gauge_id;
  double lat = 0.0;
  double lon = 0.0;
  std::string fips;
  std::string state;
};

/// Closest gauge within radius_km by great-circle distance; ties go to the
/// lexicographically smallest id.
inline std::optional<std::string> nearest_gauge(double lat, double lon, const std::vector<GaugeSite>& gauges,
                                                double radius_km) {
  if (!(radius_km > 0)) throw Error(ErrorCode::Validation, "risk", "gauge radius must be positive");
  std::optional<std::string> best;
  double best_d = 0.0;
  for (const auto& g : gauges) {
    double d = geogrid::haversine_km(lat, lon, g.lat, g.lon);
    if (d > radius_km) continue;
    if (!best || d < best_d || (d == best_d && g.gauge_id < *best)) {
      best = g.gauge_id;
      best_d = d;
    }
  }
  return best;
}

inline std::optional<std::string> nearest_gauge(const PlantRecord& p, const std::vector<GaugeSite>& gauges,
                                                double radius_km) {
  return nearest_gauge(p.lat, p.lon, gauges, radius_km);
}

struct CountyClass {
  bool water_scarce = false;
  bool temp_stressed = false;
  bool no_gauge = false;
};

inline CountyClass classify_county(double waaci_mgal, const std::vector<int>& gauge_flags) {
  CountyClass c;
  c.water_scarce = waaci_mgal < 0;
  c.no_gauge = gauge_flags.empty();
  c.temp_stressed = std::any_of(gauge_flags.begin(), gauge_flags.end(), [](int f) { return f == 1; });
  return c;
}

/// Annual delivered energy (quad/year) of a plant at the given capacity factor.
inline double mw_to_quads(double nameplate_mw, double capacity_factor) {
  if (!(capacity_factor > 0 && capacity_factor <= 1))
    throw Error(ErrorCode::Validation, "risk", "capacity factor must be in (0, 1]");
  if (nameplate_mw < 0) throw Error(ErrorCode::Validation, "risk", "negative nameplate capacity");
  return nameplate_mw * kHoursPerYear * capacity_factor * (kJoulesPerMwh / kJoulesPerBtu) / 1e15;
}

/// Reported annual generation when present, otherwise nameplate x CF.
inline double plant_quads(const PlantRecord& p, double default_cf = kDefaultCapacityFactor) {
  if (p.annual_gen_quad) return *p.annual_gen_quad;
  return mw_to_quads(p.nameplate_mw, p.capacity_factor.value_or(default_cf));
}

inline bool at_risk(const CountyClass& c, Aggregation mode) {
  return mode == Aggregation::Conjunctive ? (c.water_scarce && c.temp_stressed) : (c.water_scarce || c.temp_stressed);
}

struct RiskRow {
  std::string fips;
  std::string state;
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
  double waaci_mgal = 0.0;
  CountyClass flags;
  double wet_capacity_quad = 0.0;  // all wet-cooled plants in the county
  double capacity_at_risk_quad = 0.0;  // wet capacity if at risk under the report's mode
};

/// Generation of wet-cooled plants located in counties at risk under `mode`.
inline double capacity_at_risk(const std::vector<RiskRow>& rows, const std::vector<PlantRecord>& plants,
                               Aggregation mode, double default_cf = kDefaultCapacityFactor) {
  std::set<std::string> stressed;
  for (const auto& r : rows)
    if (at_risk(r.flags, mode)) stressed.insert(r.fips);
  double total = 0.0;
  for (const auto& p : plants)
    if (p.wet_cooled() && stressed.count(p.fips)) total += plant_quads(p, default_cf);
  return total;
}

struct ExceedanceRow {
  std::string state;
  std::string county;
  std::string fips;
  friend auto operator<=>(const ExceedanceRow&, const ExceedanceRow&) = default;
};

struct RiskReport {
  WindowLabel window = WindowLabel::W2010s;
  std::string scenario;
  std::string statistic;
  Aggregation mode = Aggregation::Disjunctive;
  std::vector<RiskRow> rows;  // sorted by (state, fips)
  std::size_t scarce_county_count = 0;
  std::vector<ExceedanceRow> exceed_counties;
  double total_quads_disjunctive = 0.0;
  double total_quads_conjunctive = 0.0;
  double default_capacity_factor = kDefaultCapacityFactor;
  std::size_t plants_using_default_cf = 0;

  double total_quads() const {
    return mode == Aggregation::Conjunctive ? total_quads_conjunctive : total_quads_disjunctive;
  }
};

struct CountySite {
  std::string fips;
  std::string state;
  std::string name;
  double lat = 0.0;
  double lon = 0.0;
};

/// Counties (by state, then name) with at least one gauge above its state
/// limit in the window.
inline std::vector<ExceedanceRow> exceedance_list(const std::map<std::string, double>& gauge_max_c,
                                                  const std::vector<GaugeSite>& gauges,
                                                  const std::map<std::string, CountySite>& counties,
                                                  const thermal::StateThresholds& thresholds) {
  std::set<ExceedanceRow> rows;
  for (const auto& g : gauges) {
    auto it = gauge_max_c.find(g.gauge_id);
    if (it == gauge_max_c.end()) continue;
    if (thermal::wtsi(it->second, g.state, thresholds) != 1) continue;
    auto c = counties.find(g.fips);
    std::string name = c != counties.end() && !c->second.name.empty() ? c->second.name : g.fips;
    std::string state = thermal::normalize_state(g.state);
    rows.insert({state, name, g.fips});
  }
  return {rows.begin(), rows.end()};
}

struct ReportInputs {
  WindowLabel window = WindowLabel::W2010s;
  std::string scenario;
  std::string statistic;
  std::map<std::string, double> waaci_by_fips;  // counties outside the grid are absent
  std::map<std::string, double> gauge_max_c;    // projected, bias-corrected maxima
  std::vector<GaugeSite> gauges;
  std::map<std::string, CountySite> counties;
  std::vector<PlantRecord> plants;
  thermal::StateThresholds thresholds = thermal::StateThresholds::standard();
  double gauge_radius_km = kDefaultGaugeRadiusKm;
  Aggregation mode = Aggregation::Disjunctive;
  double default_cf = kDefaultCapacityFactor;
};

/// Joins counties, gauge flags and plants into the per-window report.
/// A county's gauge flags come from gauges sited in it plus the nearest
/// gauge of each wet-cooled plant located in it.
inline RiskReport assemble_report(const ReportInputs& in) {
  std::map<std::string, int> gauge_flag;
  for (const auto& g : in.gauges)
    if (auto it = in.gauge_max_c.find(g.gauge_id); it != in.gauge_max_c.end())
      gauge_flag[g.gauge_id] = thermal::wtsi(it->second, g.state, in.thresholds);

  std::map<std::string, std::set<std::string>> county_gauges;
  for (const auto& g : in.gauges)
    if (gauge_flag.count(g.gauge_id)) county_gauges[g.fips].insert(g.gauge_id);
  std::vector<GaugeSite> projected;
  for (const auto& g : in.gauges)
    if (gauge_flag.count(g.gauge_id)) projected.push_back(g);
  for (const auto& p : in.plants) {
    if (!p.wet_cooled()) continue;
    if (auto id = nearest_gauge(p, projected, in.gauge_radius_km)) county_gauges[p.fips].insert(*id);
  }

  RiskReport rep;
  rep.window = in.window;
  rep.scenario = in.scenario;
  rep.statistic = in.statistic;
  rep.mode = in.mode;
  rep.default_capacity_factor = in.default_cf;

  for (const auto& [fips, waaci] : in.waaci_by_fips) {
    RiskRow row;
    row.fips = fips;
    if (auto c = in.counties.find(fips); c != in.counties.end()) {
      row.state = c->second.state;
      row.name = c->second.name;
      row.lat = c->second.lat;
      row.lon = c->second.lon;
    }
    row.waaci_mgal = waaci;
    std::vector<int> flags;
    for (const auto& id : county_gauges[fips]) flags.push_back(gauge_flag.at(id));
    row.flags = classify_county(waaci, flags);
    rep.rows.push_back(std::move(row));
  }
  std::sort(rep.rows.begin(), rep.rows.end(),
            [](const RiskRow& a, const RiskRow& b) { return std::tie(a.state, a.fips) < std::tie(b.state, b.fips); });

  std::map<std::string, double> wet_by_county;
  for (const auto& p : in.plants) {
    if (!p.wet_cooled()) continue;
    if (!p.annual_gen_quad && !p.capacity_factor) ++rep.plants_using_default_cf;
    wet_by_county[p.fips] += plant_quads(p, in.default_cf);
  }
  for (auto& r : rep.rows) {
    r.wet_capacity_quad = wet_by_county.count(r.fips) ? wet_by_county[r.fips] : 0.0;
    r.capacity_at_risk_quad = at_risk(r.flags, in.mode) ? r.wet_capacity_quad : 0.0;
    if (r.flags.water_scarce) ++rep.scarce_county_count;
  }
  rep.total_quads_disjunctive = capacity_at_risk(rep.rows, in.plants, Aggregation::Disjunctive, in.default_cf);
  rep.total_quads_conjunctive = capacity_at_risk(rep.rows, in.plants, Aggregation::Conjunctive, in.default_cf);
  rep.exceed_counties = exceedance_list(in.gauge_max_c, in.gauges, in.counties, in.thresholds);
  return rep;
}

struct TrendPoint {
  int year = 0;
  double mean_quad = 0.0;
  double sd_quad = 0.0;  // population sd across members
  std::size_t members = 0;
  bool single_member = false;
};

/// Per year, wet-cooled capacity in counties with WAACI < 0 for each member,
/// summarized as member mean and population standard deviation.
/// `member_waaci[m][year][fips]` holds yearly WAACI.
inline std::vector<TrendPoint> risk_trend(
    const std::vector<std::map<int, std::map<std::string, double>>>& member_waaci,
    const std::vector<PlantRecord>& plants, double default_cf = kDefaultCapacityFactor) {
  if (member_waaci.empty()) throw Error(ErrorCode::EmptyEnsemble, "risk", "risk trend needs at least one member");
  std::map<std::string, double> wet_by_county;
  for (const auto& p : plants)
    if (p.wet_cooled()) wet_by_county[p.fips] += plant_quads(p, default_cf);

  std::set<int> years;
  for (const auto& m : member_waaci)
    for (const auto& [y, _] : m) years.insert(y);

  std::vector<TrendPoint> out;
  for (int y : years) {
    std::vector<double> totals;
    for (const auto& m : member_waaci) {
      auto it = m.find(y);
      if (it == m.end()) continue;
      double total = 0.0;
      for (const auto& [fips, w] : it->second)
        if (w < 0)
          if (auto c = wet_by_county.find(fips); c != wet_by_county.end()) total += c->second;
      totals.push_back(total);
    }
    TrendPoint pt;
    pt.year = y;
    pt.members = totals.size();
    pt.single_member = totals.size() == 1;
    double mean = 0.0;
    for (double t : totals) mean += t;
    mean /= static_cast<double>(totals.size());
    double var = 0.0;
    for (double t : totals) var += (t - mean) * (t - mean);
    pt.mean_quad = mean;
    pt.sd_quad = std::sqrt(var / static_cast<double>(totals.size()));
    out.push_back(pt);
  }
  return out;
}

}  // namespace pprisk::risk
