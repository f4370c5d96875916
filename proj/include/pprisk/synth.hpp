#pragma once

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pprisk/error.hpp"

// Synthetic mini-dataset. Fields are bilinear in (lat, lon) with spatially
// uniform per-(member, month) noise, so centroid samples of the gridded
// fields equal the generating functions up to rounding. The sidecar is
// derived from those functions with local arithmetic only; it never calls
// the analysis modules.
namespace pprisk::synth {

namespace fs = std::filesystem;

inline constexpr const char* kSidecarFile = "expected.json";
inline constexpr int kFirstYear = 1998;
inline constexpr int kLastYear = 2042;
inline constexpr int kObsFirstYear = 1998;
inline constexpr int kObsLastYear = 2012;
inline constexpr double kMinWaterMargin = 0.02;  // |supply - demand| / max(|supply|, |demand|)

struct SynthOptions {
  unsigned long long seed = 42;
  fs::path out_dir;
  double gap_fraction = 0.08;
};

namespace detail {

inline int midx(int year, int month) { return year * 12 + month - 1; }
inline int year_of(int idx) { return idx / 12; }
inline int month_of(int idx) { return idx % 12 + 1; }
inline std::string fnum(double v) { return v == 0.0 ? "0" : fmt::format("{}", v); }

inline constexpr double kPi = std::numbers::pi;

struct MemberDef {
  std::string model, run;
  double p_offset, e_offset, t_offset;
  double step;  // grid spacing, degrees
};

struct CountyDef {
  std::string fips, name, state;
  double lat, lon, area_km2;
  double demand_ratio;  // 2010 demand / 2010s median supply before margin search
  double rate;          // target growth rate
  bool pop2000_missing = false;
};

struct GaugeDef {
  std::string id, fips, state;
  double lat, lon;
  double target_max_c;  // noise-free maximum over the observed period
  double slope_per_month = 0.0;
  int first_year = kObsFirstYear, last_year = kObsLastYear;
};

struct PlantDef {
  std::string id, name, fips, state, cooling, fuel;
  double nameplate_mw;
  double dlat, dlon;  // offset from the county centroid
  std::string annual_gen_quad, capacity_factor, streamflow_m3s, t_max_c;  // empty = absent
};

inline const std::vector<CountyDef>& counties() {
  static const std::vector<CountyDef> c{
      {"35015", "Eddy", "NM", 30.6, -104.2, 2400, 0.45, 0.010},
      {"35025", "Lea", "NM", 31.8, -104.2, 2700, 1.60, 0.005},
      {"35041", "Roosevelt", "NM", 33.0, -104.2, 2300, 0.45, 0.010},
      {"35001", "Bernalillo", "NM", 34.2, -104.2, 2100, 0.50, 0.010},
      {"48303", "Lubbock", "TX", 31.8, -102.6, 2300, 1.60, 0.005},
      {"48329", "Midland", "TX", 30.6, -101.0, 2200, 1.00, 0.000},
      {"48441", "Taylor", "TX", 33.0, -101.0, 2400, 0.80, 0.030},
      {"48451", "Tom Green", "TX", 30.6, -99.4, 2500, 0.45, 0.010},
      {"48453", "Travis", "TX", 31.8, -97.8, 2600, 1.60, 0.010},
      {"48375", "Potter", "TX", 35.4, -102.6, 2300, 0.45, 0.010},
      {"48485", "Wichita", "TX", 34.2, -99.4, 2200, 0.90, 0.020},
      {"40139", "Texas", "OK", 35.4, -101.0, 2500, 0.40, 0.000, true},
      {"40031", "Comanche", "OK", 34.2, -97.8, 2800, 0.45, 0.010},
      {"40109", "Oklahoma", "OK", 35.4, -97.8, 1900, 1.70, 0.010},
      {"48141", "El Paso", "TX", 31.8, -106.3, 2600, 0.90, 0.010},  // west of the grid
  };
  return c;
}

inline const std::vector<GaugeDef>& gauges() {
  static const std::vector<GaugeDef> g{
      {"08080500", "48303", "TX", 31.85, -102.55, 36.5},
      {"08158000", "48453", "TX", 31.85, -97.75, 36.0},
      {"07297910", "48375", "TX", 35.45, -102.55, 36.5},
      {"07241550", "40109", "OK", 35.45, -97.75, 23.0},
      {"07311000", "40031", "OK", 34.25, -97.75, 23.5},
      {"08401500", "35015", "NM", 30.65, -104.15, 19.0, 0.04},
      {"08330000", "35001", "NM", 34.25, -104.15, 20.0, -0.04},
      {"08136000", "48329", "TX", 30.65, -100.95, 23.0, 0.0, 2004, 2009},
  };
  return g;
}

inline const std::vector<PlantDef>& plants() {
  static const std::vector<PlantDef> p{
      {"P001", "Lubbock Station", "48303", "TX", "once_through", "coal", 600, 0.02, -0.02, "0.0108", "", "60", ""},
      {"P002", "Travis Energy Center", "48453", "TX", "recirculating", "gas", 800, -0.03, 0.02, "", "0.55", "", ""},
      {"P003", "Oklahoma Nuclear", "40109", "OK", "once_through", "nuclear", 1100, 0.03, 0.03, "", "0.9", "120", ""},
      {"P004", "Midland Power", "48329", "TX", "recirculating", "coal", 500, -0.02, -0.03, "", "", "", ""},
      {"P005", "Lea Dry Control", "35025", "NM", "dry", "gas", 400, 0.02, 0.02, "0.007", "", "", ""},
      {"P006", "Taylor Hybrid", "48441", "TX", "hybrid", "gas", 300, 0.01, -0.02, "", "0.5", "", ""},
      {"P007", "Potter Plant", "48375", "TX", "once_through", "coal", 700, -0.02, 0.03, "", "0.7", "", "33.0"},
      {"P008", "Comanche Station", "40031", "OK", "recirculating", "gas", 450, 0.03, -0.01, "0.006", "", "40", ""},
      {"P009", "Tom Green Works", "48451", "TX", "once_through", "gas", 350, -0.01, 0.02, "", "", "", ""},
      {"P010", "Wichita Plant", "48485", "TX", "recirculating", "coal", 650, 0.02, 0.01, "", "0.6", "", ""},
  };
  return p;
}

inline std::vector<MemberDef> members() {
  // Coarse 2 degree grid except the last member (finer, exercises regridding).
  return {{"CCSM4", "r1i1p1", 1.8, 0.2, 0.15, 2.0},   {"CCSM4", "r2i1p1", -0.6, -0.1, -0.45, 2.0},
          {"GISS-E2-H", "r1i1p1", -3.0, 0.3, 0.75, 2.0}, {"GISS-E2-H", "r2i1p1", 3.0, -0.2, -0.15, 2.0},
          {"MIROC5", "r1i1p1", 0.6, 0.1, -0.75, 2.0},    {"MIROC5", "r2i1p1", -1.8, -0.3, 0.45, 1.0}};
}

inline constexpr double kLat0 = 30.0, kLat1 = 36.0, kLon0 = -105.0, kLon1 = -97.0;

// Spatial parts, mm/month and degC.
inline double p_space(double lat, double lon) {
  double a = lat - 33.0, b = lon + 101.0;
  return 45.0 + 2.0 * a + 3.0 * b + 0.15 * a * b;
}
inline double e_space(double lat, double lon) {
  double a = lat - 33.0, b = lon + 101.0;
  return 25.0 + 1.0 * a + 0.5 * b - 0.05 * a * b;
}
inline double t_space(double lat, double lon) { return 20.0 - 0.6 * (lat - 33.0) + 0.1 * (lon + 101.0); }

struct Noise {
  std::vector<std::map<int, double>> p, e, t;  // [member][month index]
};

struct Model {
  std::vector<MemberDef> members;
  Noise noise;

  double p(std::size_t m, int idx, double lat, double lon) const {
    double season = 15.0 * std::cos(2.0 * kPi * (month_of(idx) - 6) / 12.0);
    return p_space(lat, lon) + season + members[m].p_offset + noise.p[m].at(idx);
  }
  double e(std::size_t m, int idx, double lat, double lon) const {
    double season = 10.0 * std::cos(2.0 * kPi * (month_of(idx) - 7) / 12.0);
    return e_space(lat, lon) + season + members[m].e_offset + noise.e[m].at(idx);
  }
  double t(std::size_t m, int idx, double lat, double lon) const {
    double season = 9.0 * std::cos(2.0 * kPi * (month_of(idx) - 7) / 12.0);
    double years = (idx - midx(kFirstYear, 1)) / 12.0;
    return t_space(lat, lon) + season + 0.04 * years + members[m].t_offset + noise.t[m].at(idx);
  }
  double median_t(int idx, double lat, double lon) const {
    std::vector<double> v;
    for (std::size_t m = 0; m < members.size(); ++m) v.push_back(t(m, idx, lat, lon));
    std::sort(v.begin(), v.end());
    return 0.5 * (v[2] + v[3]);
  }
  /// Lag-weighted air temperature driving stream temperature.
  double drive(int idx, double lat, double lon) const {
    return 0.5 * median_t(idx, lat, lon) + 0.3 * median_t(idx - 1, lat, lon) + 0.2 * median_t(idx - 2, lat, lon);
  }
};

inline constexpr double kStreamGain = 0.9;
inline constexpr double kMgalPerM3 = 264.172e-6;
inline constexpr double kPerCapitaM3 = 1700.0;

struct Window {
  const char* label;
  int first, last;
};
inline constexpr Window kWindows[] = {{"2010s", 2008, 2012}, {"2020s", 2018, 2022}, {"2030s", 2028, 2032}, {"2040s", 2038, 2042}};
inline constexpr const char* kStats[] = {"median", "min2", "p80"};

inline double reduce(const char* stat, std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::string s = stat;
  if (s == "median") return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  if (s == "min2") return v.size() > 1 ? v[1] : v[0];
  return v.size() > 1 ? v[v.size() - 2] : v[0];  // p80: 2nd maximum of six
}

inline double km_between(double la1, double lo1, double la2, double lo2) {
  const double r = kPi / 180.0;
  double dphi = (la2 - la1) * r, dl = (lo2 - lo1) * r;
  double h = std::pow(std::sin(dphi / 2), 2) + std::cos(la1 * r) * std::cos(la2 * r) * std::pow(std::sin(dl / 2), 2);
  return 2.0 * 6371.0 * std::asin(std::min(1.0, std::sqrt(h)));
}

inline bool inside(double lat, double lon) { return lat >= kLat0 && lat <= kLat1 && lon >= kLon0 && lon <= kLon1; }

}  // namespace detail

/// Expectations the generator derives from its own generating functions.
struct Truth {
  std::vector<std::string> members;
  std::vector<std::string> excluded_counties;
  // window -> statistic -> fips
  std::map<std::string, std::map<std::string, std::set<std::string>>> scarce, disjunctive, conjunctive;
  std::map<std::string, std::map<std::string, double>> supply_mgal;  // "window/statistic" -> fips -> value
  std::map<std::string, std::set<std::string>> hot_gauges, temp_stressed;  // window -> ids / fips
  std::map<std::string, std::map<std::string, double>> expected_max_c;    // window -> gauge -> degC
  double min_water_margin = 1.0;
  double min_temp_margin_c = 1e9;
  std::map<std::string, std::string> planted_trends;  // gauge -> up | down
  std::vector<std::string> short_record_gauges;
  std::string dry_control_plant, dry_control_county;

  nlohmann::ordered_json to_json(unsigned long long seed) const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["members"] = members;
    j["excluded_counties"] = excluded_counties;
    auto sets = [](const auto& m) {
      nlohmann::ordered_json o;
      for (const auto& [w, by_stat] : m)
        for (const auto& [s, f] : by_stat) o[w][s] = std::vector<std::string>(f.begin(), f.end());
      return o;
    };
    j["scarce"] = sets(scarce);
    j["stressed_disjunctive"] = sets(disjunctive);
    j["stressed_conjunctive"] = sets(conjunctive);
    nlohmann::ordered_json hot, ts, mx;
    for (const auto& [w, ids] : hot_gauges) hot[w] = std::vector<std::string>(ids.begin(), ids.end());
    for (const auto& [w, f] : temp_stressed) ts[w] = std::vector<std::string>(f.begin(), f.end());
    for (const auto& [w, g] : expected_max_c) mx[w] = g;
    j["hot_gauges"] = hot;
    j["temp_stressed"] = ts;
    j["expected_max_temp_c"] = mx;
    j["min_water_margin"] = min_water_margin;
    j["min_temp_margin_c"] = min_temp_margin_c;
    j["planted_trends"] = planted_trends;
    j["short_record_gauges"] = short_record_gauges;
    j["dry_control"] = {{"plant_id", dry_control_plant}, {"fips", dry_control_county}};
    return j;
  }
};

/// Writes the mini-dataset and its sidecar; returns the sidecar contents.
inline Truth synthesize(const SynthOptions& opt) {
  using namespace detail;
  if (opt.out_dir.empty()) throw Error(ErrorCode::Validation, "cli", "synth needs an output directory");
  fs::create_directories(opt.out_dir);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  Model model;
  model.members = members();
  const std::size_t M = model.members.size();
  // Noise covers two months before the grid so lagged drives exist at its start.
  const int t_begin = midx(kFirstYear, 1) - 2, t_end = midx(kLastYear + 1, 1);
  model.noise.p.resize(M);
  model.noise.e.resize(M);
  model.noise.t.resize(M);
  for (std::size_t m = 0; m < M; ++m)
    for (int i = t_begin; i < t_end; ++i) {
      model.noise.p[m][i] = 2.0 * n01(rng);
      model.noise.e[m][i] = 1.0 * n01(rng);
      model.noise.t[m][i] = 0.3 * n01(rng);
    }

  // Gridded fields, longitudes in 0..360 form.
  {
    auto write_var = [&](const char* file, const char* var, auto fn) {
      std::ofstream out(opt.out_dir / file, std::ios::binary);
      if (!out) throw Error(ErrorCode::Io, "cli", "cannot write synthetic grid");
      out << "model,scenario,run,variable,year,month,lat,lon,value\n";
      std::string buf;
      for (std::size_t m = 0; m < M; ++m) {
        const auto& md = model.members[m];
        int nlat = static_cast<int>(std::lround((kLat1 - kLat0) / md.step)) + 1;
        int nlon = static_cast<int>(std::lround((kLon1 - kLon0) / md.step)) + 1;
        for (int idx = midx(kFirstYear, 1); idx < t_end; ++idx)
          for (int a = 0; a < nlat; ++a)
            for (int b = 0; b < nlon; ++b) {
              double lat = kLat0 + a * md.step, lon = kLon0 + b * md.step;
              buf += fmt::format("{},rcp85,{},{},{},{},{},{},{}\n", md.model, md.run, var, year_of(idx), month_of(idx),
                                 fnum(lat), fnum(lon + 360.0), fnum(fn(m, idx, lat, lon)));
            }
      }
      out << buf;
    };
    write_var("grid_pr.csv", "pr", [&](std::size_t m, int i, double la, double lo) { return model.p(m, i, la, lo); });
    write_var("grid_evspsbl.csv", "evspsbl",
              [&](std::size_t m, int i, double la, double lo) { return model.e(m, i, la, lo); });
    write_var("grid_tas.csv", "tas", [&](std::size_t m, int i, double la, double lo) { return model.t(m, i, la, lo); });
  }

  Truth truth;
  for (const auto& md : model.members) truth.members.push_back(md.model + ":" + md.run);
  std::sort(truth.members.begin(), truth.members.end());

  // County supply per member and window from the generating functions.
  auto supply = [&](const CountyDef& c, const Window& w) {
    std::vector<double> v;
    for (std::size_t m = 0; m < M; ++m) {
      double depth = 0.0;
      for (int i = midx(w.first, 1); i < midx(w.last + 1, 1); ++i) depth += model.p(m, i, c.lat, c.lon) - model.e(m, i, c.lat, c.lon);
      v.push_back(depth / (w.last - w.first + 1) * c.area_km2 * 1000.0 * kMgalPerM3);
    }
    return v;
  };
  auto demand = [](double p2000, double p2010, bool missing, int year) {
    double r = missing || p2000 <= 0 ? 0.0 : std::pow(p2010 / p2000, 0.1) - 1.0;
    return p2010 * std::pow(1.0 + r, year - 2010) * kPerCapitaM3 * kMgalPerM3;
  };

  struct Pop {
    double p2000, p2010;
  };
  std::map<std::string, Pop> pops;
  for (const auto& c : counties()) {
    if (!inside(c.lat, c.lon)) {
      truth.excluded_counties.push_back(c.fips);
      pops[c.fips] = {100000, 120000};
      continue;
    }
    std::map<std::string, std::vector<double>> sup;
    for (const auto& w : kWindows) sup[w.label] = supply(c, w);
    double ref = reduce("median", sup["2010s"]);
    double per_person = kPerCapitaM3 * kMgalPerM3;
    Pop best{0, 0};
    double best_margin = -1.0;
    // Nudge the population scale until every window/statistic clears the margin.
    for (int k = 0; k < 200 && best_margin < kMinWaterMargin; ++k) {
      double mult = 1.0 + 0.01 * ((k + 1) / 2) * (k % 2 ? 1 : -1);
      double p2010 = std::round(c.demand_ratio * mult * std::abs(ref) / per_person);
      double p2000 = c.pop2000_missing ? 0.0 : std::round(p2010 / std::pow(1.0 + c.rate, 10));
      double margin = 1.0;
      for (const auto& w : kWindows) {
        double d = demand(p2000, p2010, c.pop2000_missing, (w.first + w.last) / 2);
        for (const char* s : kStats) {
          double sv = reduce(s, sup[w.label]);
          margin = std::min(margin, std::abs(sv - d) / std::max(std::abs(sv), std::abs(d)));
        }
      }
      if (margin > best_margin) {
        best_margin = margin;
        best = {p2000, p2010};
      }
    }
    pops[c.fips] = best;
    truth.min_water_margin = std::min(truth.min_water_margin, best_margin);
    for (const auto& w : kWindows) {
      double d = demand(best.p2000, best.p2010, c.pop2000_missing, (w.first + w.last) / 2);
      for (const char* s : kStats) {
        double sv = reduce(s, sup[w.label]);
        truth.supply_mgal[std::string(w.label) + "/" + s][c.fips] = sv;
        auto& set = truth.scarce[w.label][s];
        if (sv - d < 0) set.insert(c.fips);
      }
    }
  }

  // Counties.
  {
    std::string s = "fips,name,state,lat,lon,area_km2,pop2000,pop2010\n";
    for (const auto& c : counties()) {
      const auto& p = pops[c.fips];
      s += fmt::format("{},{},{},{},{},{},{},{}\n", c.fips, c.name, c.state, fnum(c.lat), fnum(c.lon), fnum(c.area_km2),
                       c.pop2000_missing ? std::string() : fnum(p.p2000), fnum(p.p2010));
    }
    std::ofstream(opt.out_dir / "counties.csv", std::ios::binary) << s;
    double total2020 = 0.0;
    for (const auto& c : counties()) total2020 += demand(pops[c.fips].p2000, pops[c.fips].p2010, c.pop2000_missing, 2020) / (kPerCapitaM3 * kMgalPerM3);
    std::ofstream(opt.out_dir / "national.csv", std::ios::binary)
        << fmt::format("year,population\n2020,{}\n", fnum(std::round(total2020 * 1.01)));
  }

  // Gauges: stream temperature follows the lag-weighted ensemble-median air
  // temperature at the gauge, plus an optional planted trend and noise.
  {
    std::string s = "gauge_id,lat,lon,fips,state,year,month,temp_c\n";
    for (const auto& g : gauges()) {
      int a = midx(g.first_year, 1), b = midx(g.last_year + 1, 1);
      double peak = -1e9;
      for (int i = a; i < b; ++i) peak = std::max(peak, kStreamGain * model.drive(i, g.lat, g.lon));
      double c0 = g.target_max_c - peak;
      for (int i = a; i < b; ++i) {
        double v = c0 + kStreamGain * model.drive(i, g.lat, g.lon) + g.slope_per_month * (i - a) + 0.3 * n01(rng);
        bool gap = u01(rng) < opt.gap_fraction && i > a && i + 1 < b;
        s += fmt::format("{},{},{},{},{},{},{},{}\n", g.id, fnum(g.lat), fnum(g.lon), g.fips, g.state, year_of(i),
                         month_of(i), gap ? std::string() : fmt::format("{:.2f}", v));
      }
      if (g.slope_per_month > 0) truth.planted_trends[g.id] = "up";
      if (g.slope_per_month < 0) truth.planted_trends[g.id] = "down";
      if (g.last_year - g.first_year + 1 < 7) truth.short_record_gauges.push_back(g.id);
      for (const auto& w : kWindows) {
        double mx = -1e9;
        for (int i = midx(w.first, 1); i < midx(w.last + 1, 1); ++i)
          mx = std::max(mx, c0 + kStreamGain * model.drive(i, g.lat, g.lon));
        truth.expected_max_c[w.label][g.id] = mx;
        double threshold = 32.2;  // TX, NM and OK are not listed in the state table
        truth.min_temp_margin_c = std::min(truth.min_temp_margin_c, std::abs(mx - threshold));
        auto& hot = truth.hot_gauges[w.label];
        if (mx > threshold) hot.insert(g.id);
      }
    }
    std::ofstream(opt.out_dir / "gauges.csv", std::ios::binary) << s;
  }

  // Plants near their county centroid.
  std::map<std::string, const CountyDef*> by_fips;
  for (const auto& c : counties()) by_fips[c.fips] = &c;
  {
    std::string s =
        "plant_id,name,lat,lon,fips,state,cooling,fuel,nameplate_mw,annual_gen_quad,capacity_factor,streamflow_m3s,"
        "t_max_c\n";
    for (const auto& p : plants()) {
      const auto& c = *by_fips.at(p.fips);
      s += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", p.id, p.name, fnum(c.lat + p.dlat),
                       fnum(c.lon + p.dlon), p.fips, p.state, p.cooling, p.fuel, fnum(p.nameplate_mw),
                       p.annual_gen_quad, p.capacity_factor, p.streamflow_m3s, p.t_max_c);
      if (p.cooling == "dry") {
        truth.dry_control_plant = p.id;
        truth.dry_control_county = p.fips;
      }
    }
    std::ofstream(opt.out_dir / "plants.csv", std::ios::binary) << s;
  }

  // County temperature stress: gauges sited in the county plus the nearest
  // gauge (100 km, ties by id) of each wet-cooled plant located there.
  for (const auto& w : kWindows) {
    std::set<std::string> hot_fips;
    const auto& hot = truth.hot_gauges[w.label];
    for (const auto& g : gauges())
      if (hot.count(g.id)) hot_fips.insert(g.fips);
    for (const auto& p : plants()) {
      if (p.cooling != "once_through" && p.cooling != "recirculating") continue;
      const auto& c = *by_fips.at(p.fips);
      double plat = c.lat + p.dlat, plon = c.lon + p.dlon;
      std::string best;
      double best_d = 1e18;
      for (const auto& g : gauges()) {
        double d = km_between(plat, plon, g.lat, g.lon);
        if (d <= 100.0 && (d < best_d || (d == best_d && g.id < best))) {
          best_d = d;
          best = g.id;
        }
      }
      if (!best.empty() && hot.count(best)) hot_fips.insert(p.fips);
    }
    std::set<std::string> in_grid;
    for (const auto& c : counties())
      if (inside(c.lat, c.lon)) in_grid.insert(c.fips);
    std::set<std::string> ts;
    for (const auto& f : hot_fips)
      if (in_grid.count(f)) ts.insert(f);
    truth.temp_stressed[w.label] = ts;
    for (const char* s : kStats) {
      const auto& sc = truth.scarce[w.label][s];
      auto& dis = truth.disjunctive[w.label][s];
      auto& con = truth.conjunctive[w.label][s];
      dis = sc;
      dis.insert(ts.begin(), ts.end());
      for (const auto& f : sc)
        if (ts.count(f)) con.insert(f);
    }
  }

  std::ofstream(opt.out_dir / kSidecarFile, std::ios::binary) << truth.to_json(opt.seed).dump(1) << "\n";
  return truth;
}

/// Reads the sidecar sets written by synthesize.
inline nlohmann::ordered_json read_sidecar(const fs::path& dir) {
  std::ifstream in(dir / kSidecarFile);
  if (!in) throw Error(ErrorCode::Io, "cli", "cannot open " + (dir / kSidecarFile).string());
  return nlohmann::ordered_json::parse(in);
}

}  // namespace pprisk::synth
