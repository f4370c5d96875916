#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "pprisk/csv.hpp"
#include "pprisk/error.hpp"
#include "pprisk/geogrid.hpp"
#include "pprisk/io/dataset.hpp"
#include "pprisk/streamtemp/projection.hpp"
#include "pprisk/thermal.hpp"

namespace pprisk::io {

enum class Severity { Warning, Error };

struct Issue {
  Severity severity;
  std::string where;  // "file:line" or "file"
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> issues;

  std::size_t errors() const {
    std::size_t n = 0;
    for (const auto& i : issues) n += i.severity == Severity::Error;
    return n;
  }
  std::size_t warnings() const { return issues.size() - errors(); }
  bool ok() const { return errors() == 0; }

  void error(std::string where, std::string msg) { issues.push_back({Severity::Error, std::move(where), std::move(msg)}); }
  void warn(std::string where, std::string msg) { issues.push_back({Severity::Warning, std::move(where), std::move(msg)}); }

  std::string text() const {
    std::string out;
    for (const auto& i : issues)
      out += std::string(i.severity == Severity::Error ? "error: " : "warning: ") + i.where + ": " + i.message + "\n";
    return out;
  }
};

namespace detail {

inline std::string at(const csv::Table& t, const csv::Row& r) { return t.path() + ":" + std::to_string(r.line()); }

/// Reads a table, recording a parse failure instead of throwing.
inline std::optional<csv::Table> try_read(const fs::path& path, ValidationReport& rep) {
  try {
    return csv::Table::read(path.string());
  } catch (const Error& e) {
    rep.error(path.string(), e.what());
    return std::nullopt;
  }
}

/// Runs a row check, turning conversion failures into issues.
template <class Fn>
void each_row(const csv::Table& t, ValidationReport& rep, Fn&& fn) {
  for (const auto& r : t.rows()) {
    try {
      fn(r);
    } catch (const Error& e) {
      rep.error(at(t, r), e.what());
    }
  }
}

template <class Fn>
bool required(const csv::Table& t, ValidationReport& rep, Fn&& columns) {
  try {
    columns();
    return true;
  } catch (const Error& e) {
    rep.error(t.path(), e.what());
    return false;
  }
}

}  // namespace detail

/// Schema, unit-range and referential checks over a dataset directory.
/// Never throws for data problems; every finding becomes an issue.
inline ValidationReport validate_dataset(const fs::path& dir) {
  ValidationReport rep;
  if (!fs::is_directory(dir)) {
    rep.error(dir.string(), "dataset directory not found");
    return rep;
  }
  for (const char* f : {kCountiesFile, kGaugesFile, kPlantsFile})
    if (!fs::exists(dir / f)) rep.error((dir / f).string(), "required file missing");

  std::set<std::string> fips;
  std::map<std::string, std::pair<double, double>> centroid;
  if (auto t = fs::exists(dir / kCountiesFile) ? detail::try_read(dir / kCountiesFile, rep) : std::nullopt) {
    if (detail::required(*t, rep, [&] { t->require({"fips", "state", "lat", "lon", "area_km2", "pop2000", "pop2010"}); }))
      detail::each_row(*t, rep, [&](const csv::Row& r) {
        auto where = detail::at(*t, r);
        std::string f = normalize_fips(r.str("fips"));
        if (f.empty()) return rep.error(where, "fips must be 1-5 digits");
        if (!fips.insert(f).second) rep.error(where, "duplicate county fips " + f);
        double lat = r.num("lat"), lon = r.num("lon");
        if (lat < -90 || lat > 90) rep.error(where, "lat outside [-90, 90]");
        if (lon < -180 || lon > 360) rep.error(where, "lon outside [-180, 360]");
        centroid[f] = {lat, geogrid::normalize_longitude(lon)};
        if (!(r.num("area_km2") > 0)) rep.error(where, "area_km2 must be positive");
        if (r.num("pop2010") < 0) rep.error(where, "pop2010 must be non-negative");
        auto p2000 = r.opt_num("pop2000");
        if (p2000 && *p2000 < 0) rep.error(where, "pop2000 must be non-negative");
        if (!p2000 || *p2000 == 0) rep.warn(where, "pop2000 missing or zero: growth rate falls back to 0");
        if (csv::trim(r.str("state")).empty()) rep.error(where, "empty state");
      });
  }

  if (fs::exists(dir / kNationalFile))
    if (auto t = detail::try_read(dir / kNationalFile, rep))
      if (detail::required(*t, rep, [&] { t->require({"year", "population"}); }))
        detail::each_row(*t, rep, [&](const csv::Row& r) {
          r.integer("year");
          if (!(r.num("population") > 0)) rep.error(detail::at(*t, r), "national population must be positive");
        });

  if (auto t = fs::exists(dir / kGaugesFile) ? detail::try_read(dir / kGaugesFile, rep) : std::nullopt) {
    if (detail::required(*t, rep, [&] { t->require({"gauge_id", "lat", "lon", "fips", "state", "year", "month", "temp_c"}); })) {
      std::map<std::string, std::tuple<double, double, std::string>> meta;
      std::set<std::pair<std::string, int>> seen;
      detail::each_row(*t, rep, [&](const csv::Row& r) {
        auto where = detail::at(*t, r);
        std::string id(csv::trim(r.str("gauge_id")));
        if (id.empty()) return rep.error(where, "empty gauge_id");
        double lat = r.num("lat"), lon = r.num("lon");
        std::string f = normalize_fips(r.str("fips"));
        auto [it, fresh] = meta.try_emplace(id, lat, lon, f);
        if (fresh) {
          if (!fips.empty() && !fips.count(f)) rep.error(where, "gauge " + id + " fips '" + std::string(r.str("fips")) + "' not in county table");
        } else if (std::get<0>(it->second) != lat || std::get<1>(it->second) != lon || std::get<2>(it->second) != f) {
          rep.error(where, "gauge " + id + " location or county changes between rows");
        }
        int month = r.integer("month");
        if (month < 1 || month > 12) rep.error(where, "month must be 1..12");
        if (!seen.insert({id, YearMonth{r.integer("year"), month}.index()}).second)
          rep.error(where, "duplicate month for gauge " + id);
        if (auto v = r.opt_num("temp_c"); v && (*v < streamtemp::kMinStreamTemp || *v > streamtemp::kMaxStreamTemp))
          rep.error(where, "temp_c " + std::string(csv::trim(r.str("temp_c"))) + " outside [-5, 50] degC");
      });
    }
  }

  if (auto t = fs::exists(dir / kPlantsFile) ? detail::try_read(dir / kPlantsFile, rep) : std::nullopt) {
    if (detail::required(*t, rep, [&] {
          t->require({"plant_id", "name", "lat", "lon", "fips", "state", "cooling", "fuel", "nameplate_mw",
                      "annual_gen_quad", "capacity_factor"});
        })) {
      std::set<std::string> ids;
      detail::each_row(*t, rep, [&](const csv::Row& r) {
        auto where = detail::at(*t, r);
        std::string id(csv::trim(r.str("plant_id")));
        if (id.empty() || !ids.insert(id).second) rep.error(where, "missing or duplicate plant_id '" + id + "'");
        std::string f = normalize_fips(r.str("fips"));
        if (!fips.empty() && !fips.count(f))
          rep.error(where, "plant " + id + " fips '" + std::string(r.str("fips")) + "' not in county table");
        if (!thermal::parse_cooling(csv::trim(r.str("cooling"))))
          rep.error(where, "cooling must be once_through, recirculating, dry or hybrid");
        if (!(r.num("nameplate_mw") > 0)) rep.error(where, "nameplate_mw must be positive");
        if (auto cf = r.opt_num("capacity_factor"); cf && !(*cf > 0 && *cf <= 1))
          rep.error(where, "capacity_factor must be in (0, 1]");
        if (auto q = r.opt_num("annual_gen_quad"); q && *q < 0) rep.error(where, "annual_gen_quad must be non-negative");
        if (auto q = r.opt_num("streamflow_m3s"); q && *q < 0) rep.error(where, "streamflow_m3s must be non-negative");
        double lat = r.num("lat");
        if (lat < -90 || lat > 90) rep.error(where, "lat outside [-90, 90]");
      });
      // Thermal parameter ranges via the same checks the physics applies.
      try {
        for (const auto& p : plants_from(*t)) {
          try {
            p.thermal.validate();
          } catch (const Error& e) {
            rep.error(t->path(), "plant " + p.plant_id + ": " + e.what());
          }
        }
      } catch (const Error&) {
        // conversion failures already reported row by row
      }
    }
  }

  if (fs::exists(dir / kThresholdsFile)) {
    try {
      thermal::StateThresholds::from_csv((dir / kThresholdsFile).string());
    } catch (const Error& e) {
      rep.error((dir / kThresholdsFile).string(), e.what());
    }
  }

  auto files = grid_files(dir);
  if (files.empty()) {
    rep.error(dir.string(), "no " + std::string(kGridPrefix) + "*.csv climate files");
  } else {
    try {
      auto fields = read_grids(files);
      std::map<std::tuple<std::string, std::string, std::string>, std::set<geogrid::Variable>> vars;
      for (const auto& f : fields) vars[{f.provenance.model, f.provenance.scenario, f.provenance.run}].insert(f.variable);
      for (const auto& [k, v] : vars) {
        auto name = std::get<0>(k) + "/" + std::get<1>(k) + "/" + std::get<2>(k);
        if (!v.count(geogrid::Variable::Precipitation) || !v.count(geogrid::Variable::Evapotranspiration))
          rep.error(dir.string(), "member " + name + " lacks precipitation or evapotranspiration");
        if (!v.count(geogrid::Variable::AirTemperature))
          rep.warn(dir.string(), "member " + name + " has no air temperature; excluded from stream projections");
      }
      if (!fields.empty())
        for (const auto& [f, ll] : centroid)
          if (!fields.front().spec.contains(ll.first, ll.second))
            rep.warn(dir.string(), "county " + f + " centroid lies outside the climate grid; it will be excluded");
    } catch (const Error& e) {
      rep.error(dir.string(), e.what());
    }
  }
  return rep;
}

}  // namespace pprisk::io
