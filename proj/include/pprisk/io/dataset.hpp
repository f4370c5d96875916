#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "pprisk/calendar.hpp"
#include "pprisk/csv.hpp"
#include "pprisk/demography.hpp"
#include "pprisk/error.hpp"
#include "pprisk/geogrid.hpp"
#include "pprisk/risk.hpp"
#include "pprisk/streamtemp/projection.hpp"
#include "pprisk/thermal.hpp"

namespace pprisk::io {

namespace fs = std::filesystem;

inline constexpr const char* kCountiesFile = "counties.csv";
inline constexpr const char* kNationalFile = "national.csv";
inline constexpr const char* kGaugesFile = "gauges.csv";
inline constexpr const char* kPlantsFile = "plants.csv";
inline constexpr const char* kThresholdsFile = "thresholds.csv";
inline constexpr const char* kGridPrefix = "grid";

/// Axis tolerance (degrees) when checking grid regularity.
inline constexpr double kAxisTolerance = 1e-6;

/// Left-pads a numeric county code to five digits; empty when not numeric.
inline std::string normalize_fips(std::string_view raw) {
  std::string_view s = csv::trim(raw);
  if (s.empty() || s.size() > 5 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return {};
  return std::string(5 - s.size(), '0') + std::string(s);
}

inline std::vector<demography::CountyRecord> counties_from(const csv::Table& t) {
  t.require({"fips", "state", "lat", "lon", "area_km2", "pop2000", "pop2010"});
  std::vector<demography::CountyRecord> out;
  for (const auto& r : t.rows()) {
    demography::CountyRecord c;
    c.fips = normalize_fips(r.str("fips"));
    if (c.fips.empty()) r.fail("fips", "county code must be 1-5 digits");
    c.state = thermal::normalize_state(r.str("state"));
    if (r.has("name")) c.name = std::string(csv::trim(r.str("name")));
    c.lat = r.num("lat");
    c.lon = geogrid::normalize_longitude(r.num("lon"));
    c.area_km2 = r.num("area_km2");
    c.pop2000 = r.opt_num("pop2000").value_or(0.0);
    c.pop2010 = r.num("pop2010");
    out.push_back(std::move(c));
  }
  return out;
}

inline std::map<int, double> national_from(const csv::Table& t) {
  t.require({"year", "population"});
  std::map<int, double> out;
  for (const auto& r : t.rows()) out[r.integer("year")] = r.num("population");
  return out;
}

/// Groups long-format gauge rows into one gap-marked series per gauge,
/// ordered by gauge id.
inline std::vector<streamtemp::GaugeSeries> gauges_from(const csv::Table& t) {
  t.require({"gauge_id", "lat", "lon", "fips", "state", "year", "month", "temp_c"});
  struct Acc {
    streamtemp::GaugeSeries meta;
    std::map<int, std::optional<double>> months;
  };
  std::map<std::string, Acc> by_id;
  for (const auto& r : t.rows()) {
    std::string id(csv::trim(r.str("gauge_id")));
    if (id.empty()) r.fail("gauge_id", "empty gauge id");
    auto [it, fresh] = by_id.try_emplace(id);
    auto& acc = it->second;
    if (fresh) {
      acc.meta.gauge_id = id;
      acc.meta.lat = r.num("lat");
      acc.meta.lon = geogrid::normalize_longitude(r.num("lon"));
      acc.meta.fips = normalize_fips(r.str("fips"));
      acc.meta.state = thermal::normalize_state(r.str("state"));
    }
    int month = r.integer("month");
    if (month < 1 || month > 12) r.fail("month", "month must be 1..12");
    int idx = YearMonth{r.integer("year"), month}.index();
    if (acc.months.count(idx)) r.fail("month", "duplicate gauge month");
    acc.months[idx] = r.opt_num("temp_c");
  }
  std::vector<streamtemp::GaugeSeries> out;
  for (auto& [id, acc] : by_id) {
    auto g = std::move(acc.meta);
    int first = acc.months.begin()->first, last = acc.months.rbegin()->first;
    g.start = YearMonth::from_index(first);
    g.temps.assign(static_cast<std::size_t>(last - first + 1), std::nullopt);
    for (const auto& [idx, v] : acc.months) g.temps[static_cast<std::size_t>(idx - first)] = v;
    out.push_back(std::move(g));
  }
  return out;
}

inline std::vector<risk::PlantRecord> plants_from(const csv::Table& t) {
  t.require({"plant_id", "name", "lat", "lon", "fips", "state", "cooling", "fuel", "nameplate_mw", "annual_gen_quad",
             "capacity_factor"});
  std::vector<risk::PlantRecord> out;
  for (const auto& r : t.rows()) {
    risk::PlantRecord p;
    p.plant_id = std::string(csv::trim(r.str("plant_id")));
    p.name = std::string(csv::trim(r.str("name")));
    p.lat = r.num("lat");
    p.lon = geogrid::normalize_longitude(r.num("lon"));
    p.fips = normalize_fips(r.str("fips"));
    p.state = thermal::normalize_state(r.str("state"));
    auto cooling = thermal::parse_cooling(csv::trim(r.str("cooling")));
    if (!cooling) r.fail("cooling", "expected once_through, recirculating, dry or hybrid");
    p.cooling = *cooling;
    p.fuel = std::string(csv::trim(r.str("fuel")));
    p.nameplate_mw = r.num("nameplate_mw");
    p.annual_gen_quad = r.opt_num("annual_gen_quad");
    p.capacity_factor = r.opt_num("capacity_factor");
    p.streamflow_m3s = r.opt_num("streamflow_m3s");
    auto& th = p.thermal;
    th.capacity_w = p.nameplate_mw * 1e6;
    th.cooling = p.cooling;
    auto opt = [&](const char* col, double& field) {
      if (auto v = r.opt_num(col)) field = *v;
    };
    opt("eta_total", th.eta_total);
    opt("eta_elec", th.eta_elec);
    opt("alpha", th.alpha);
    opt("beta", th.beta);
    opt("omega", th.omega);
    opt("epsilon", th.epsilon);
    opt("lambda", th.lambda);
    opt("dt_max_k", th.delta_t_max_k);
    opt("gamma", th.gamma);
    if (auto v = r.opt_num("t_max_c")) {
      th.t_max_c = *v;
      p.t_max_from_inventory = true;
    }
    out.push_back(std::move(p));
  }
  return out;
}

/// Streams long-format grid files into one field per (model, scenario, run,
/// variable). Longitudes are normalized to [-180, 180); axes must be regular,
/// times contiguous, and every (time, lat, lon) present exactly once.
inline std::vector<geogrid::GriddedField> read_grids(const std::vector<fs::path>& files) {
  struct Entry {
    int t;
    double lat, lon, value;
  };
  using Key = std::tuple<std::string, std::string, std::string, geogrid::Variable>;
  std::map<Key, std::vector<Entry>> groups;
  std::map<Key, std::string> origin;

  static constexpr const char* kColumns[] = {"model", "scenario", "run", "variable", "year",
                                             "month", "lat",      "lon", "value"};
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::Io, "geogrid", "cannot open " + file.string());
    std::string line;
    std::size_t lineno = 0;
    std::size_t col[9];
    bool header = false;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::Parse, "geogrid", file.string() + ":" + std::to_string(lineno) + ": " + why);
    };
    auto number = [&](const std::string& s, const char* name) {
      double v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
        fail(std::string("column '") + name + "': not a number: '" + s + "'");
      return v;
    };
    std::vector<std::string> header_fields;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view view = csv::trim(line);
      if (view.empty()) continue;
      auto f = csv::split_line(view);
      for (auto& x : f) x = std::string(csv::trim(x));
      if (!header) {
        for (std::size_t k = 0; k < 9; ++k) {
          auto it = std::find(f.begin(), f.end(), kColumns[k]);
          if (it == f.end()) fail(std::string("missing required column '") + kColumns[k] + "'");
          col[k] = static_cast<std::size_t>(it - f.begin());
        }
        header_fields = f;
        header = true;
        continue;
      }
      if (f.size() != header_fields.size())
        fail("expected " + std::to_string(header_fields.size()) + " fields, found " + std::to_string(f.size()));
      auto var = geogrid::parse_variable(f[col[3]]);
      if (!var) fail("unknown variable '" + f[col[3]] + "'");
      double year = number(f[col[4]], "year"), month = number(f[col[5]], "month");
      if (month < 1 || month > 12 || month != std::floor(month) || year != std::floor(year))
        fail("invalid year/month");
      Key key{f[col[0]], f[col[1]], f[col[2]], *var};
      origin.try_emplace(key, file.string());
      groups[key].push_back({YearMonth{static_cast<int>(year), static_cast<int>(month)}.index(),
                             number(f[col[6]], "lat"), geogrid::normalize_longitude(number(f[col[7]], "lon")),
                             number(f[col[8]], "value")});
    }
    if (!header) throw Error(ErrorCode::Parse, "geogrid", file.string() + ": empty file, no header");
  }

  auto regular_axis = [](std::vector<double> v, const std::string& what, double& start, double& step, int& count) {
    std::sort(v.begin(), v.end());
    std::vector<double> uniq;
    for (double x : v)
      if (uniq.empty() || x - uniq.back() > kAxisTolerance) uniq.push_back(x);
    if (uniq.size() < 2) throw Error(ErrorCode::Validation, "geogrid", what + ": axis needs at least 2 nodes");
    start = uniq.front();
    step = (uniq.back() - uniq.front()) / static_cast<double>(uniq.size() - 1);
    for (std::size_t k = 0; k < uniq.size(); ++k)
      if (std::abs(uniq[k] - (start + static_cast<double>(k) * step)) > kAxisTolerance)
        throw Error(ErrorCode::Validation, "geogrid", what + ": axis is not regularly spaced");
    count = static_cast<int>(uniq.size());
  };

  std::vector<geogrid::GriddedField> out;
  for (auto& [key, entries] : groups) {
    const auto& [model, scenario, run, var] = key;
    std::string what = origin[key] + " " + model + "/" + scenario + "/" + run + "/" +
                       std::string(geogrid::to_string(var));
    geogrid::GriddedField f;
    f.provenance = {model, scenario, run};
    f.variable = var;
    f.units = std::string(geogrid::default_units(var));
    std::vector<double> lats, lons;
    int tmin = entries.front().t, tmax = entries.front().t;
    for (const auto& e : entries) {
      lats.push_back(e.lat);
      lons.push_back(e.lon);
      tmin = std::min(tmin, e.t);
      tmax = std::max(tmax, e.t);
    }
    regular_axis(lats, what + " latitude", f.spec.lat_start, f.spec.lat_step, f.spec.lat_count);
    regular_axis(lons, what + " longitude", f.spec.lon_start, f.spec.lon_step, f.spec.lon_count);
    for (int t = tmin; t <= tmax; ++t) f.times.push_back(YearMonth::from_index(t));
    f.values.assign(f.times.size() * f.spec.nodes(), std::nan(""));
    std::vector<char> seen(f.values.size(), 0);
    for (const auto& e : entries) {
      int i = static_cast<int>(std::lround((e.lat - f.spec.lat_start) / f.spec.lat_step));
      int j = static_cast<int>(std::lround((e.lon - f.spec.lon_start) / f.spec.lon_step));
      std::size_t off = f.offset(static_cast<std::size_t>(e.t - tmin), i, j);
      if (seen[off]) throw Error(ErrorCode::Validation, "geogrid", what + ": duplicate grid cell value");
      seen[off] = 1;
      f.values[off] = e.value;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw Error(ErrorCode::Validation, "geogrid", what + ": missing grid values (time axis or nodes incomplete)");
    f.validate();
    out.push_back(std::move(f));
  }
  return out;
}

inline std::vector<fs::path> grid_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) return files;
  for (const auto& e : fs::directory_iterator(dir)) {
    auto name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind(kGridPrefix, 0) == 0 && e.path().extension() == ".csv")
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Everything the pipeline consumes, loaded from one directory.
struct Dataset {
  fs::path root;
  std::vector<demography::CountyRecord> counties;
  std::map<int, double> national;
  std::vector<streamtemp::GaugeSeries> gauges;
  std::vector<risk::PlantRecord> plants;
  std::vector<geogrid::GriddedField> fields;
  std::optional<thermal::StateThresholds> thresholds;
};

inline Dataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "io", "dataset directory not found: " + dir.string());
  Dataset d;
  d.root = dir;
  d.counties = counties_from(csv::Table::read((dir / kCountiesFile).string()));
  if (fs::exists(dir / kNationalFile)) d.national = national_from(csv::Table::read((dir / kNationalFile).string()));
  d.gauges = gauges_from(csv::Table::read((dir / kGaugesFile).string()));
  d.plants = plants_from(csv::Table::read((dir / kPlantsFile).string()));
  auto files = grid_files(dir);
  if (files.empty()) throw Error(ErrorCode::Io, "io", "no " + std::string(kGridPrefix) + "*.csv files in " + dir.string());
  d.fields = read_grids(files);
  if (fs::exists(dir / kThresholdsFile)) d.thresholds = thermal::StateThresholds::from_csv((dir / kThresholdsFile).string());
  return d;
}

}  // namespace pprisk::io
