#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "pprisk/calendar.hpp"
#include "pprisk/demography.hpp"
#include "pprisk/ensemble.hpp"
#include "pprisk/error.hpp"
#include "pprisk/geogrid.hpp"
#include "pprisk/io/dataset.hpp"
#include "pprisk/io/validate.hpp"
#include "pprisk/parallel.hpp"
#include "pprisk/risk.hpp"
#include "pprisk/streamtemp.hpp"
#include "pprisk/thermal.hpp"
#include "pprisk/watersupply.hpp"

namespace pprisk::pipeline {

namespace fs = std::filesystem;

struct PipelineConfig {
  fs::path data_dir;
  fs::path out_dir = "out";
  ensemble::Scenario scenario = ensemble::Scenario::Rcp85;
  std::vector<ensemble::Statistic> statistics{ensemble::Statistic::Median};
  std::vector<WindowLabel> windows{WindowLabel::W2010s, WindowLabel::W2020s, WindowLabel::W2030s, WindowLabel::W2040s};
  double per_capita_m3 = watersupply::kDefaultPerCapitaM3;
  watersupply::DemandMode demand_mode = watersupply::DemandMode::Absolute;
  double alpha = 0.10;
  double gauge_radius_km = risk::kDefaultGaugeRadiusKm;
  risk::Aggregation aggregation = risk::Aggregation::Disjunctive;
  double capacity_factor = risk::kDefaultCapacityFactor;
  unsigned threads = 1;  // 0 = hardware concurrency
  std::optional<fs::path> thresholds_path;
  int predictor_model = 4;

  void validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::Validation, "cli", m); };
    if (statistics.empty()) bad("at least one ensemble statistic is required");
    if (windows.empty()) bad("at least one window is required");
    if (!(per_capita_m3 >= 0)) bad("per-capita demand must be non-negative");
    if (!(alpha > 0 && alpha < 1)) bad("alpha must be in (0, 1)");
    if (!(gauge_radius_km > 0)) bad("gauge radius must be positive");
    if (!(capacity_factor > 0 && capacity_factor <= 1)) bad("capacity factor must be in (0, 1]");
    if (predictor_model < 1 || predictor_model > 4) bad("predictor model must be 1..4");
  }

  unsigned worker_count() const {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

/// Climate inputs of one ensemble member on the common grid.
struct MemberClimate {
  geogrid::Provenance provenance;
  geogrid::GriddedField freshwater;  // P - E, mm/month
  std::optional<geogrid::GriddedField> air;
  std::optional<geogrid::GriddedField> longwave;
  std::optional<geogrid::GriddedField> shortwave;

  std::string id() const { return provenance.member_id(); }
};

struct Ensemble {
  ensemble::EnsembleSpec spec;
  geogrid::GridSpec grid;
  std::vector<MemberClimate> members;  // sorted by member id
  std::size_t regridded = 0;  // fields resampled onto the common grid
};

/// Members of the configured scenario, every field on the first member's grid.
inline Ensemble assemble_ensemble(const std::vector<geogrid::GriddedField>& fields, ensemble::Scenario scenario) {
  using geogrid::Variable;
  std::map<std::pair<std::string, std::string>, std::map<Variable, const geogrid::GriddedField*>> by_member;
  for (const auto& f : fields) {
    auto s = ensemble::parse_scenario(f.provenance.scenario);
    if (!s || *s != scenario) continue;
    by_member[{f.provenance.model, f.provenance.run}][f.variable] = &f;
  }
  Ensemble ens;
  ens.spec.scenario = scenario;
  bool have_grid = false;
  for (const auto& [key, vars] : by_member) {
    if (!vars.count(Variable::Precipitation) || !vars.count(Variable::Evapotranspiration)) continue;
    if (!have_grid) {
      ens.grid = vars.at(Variable::Precipitation)->spec;
      have_grid = true;
    }
    auto on_grid = [&](const geogrid::GriddedField& f) {
      if (f.spec == ens.grid) return f;
      ++ens.regridded;
      return geogrid::regrid_bilinear(f, ens.grid);
    };
    MemberClimate m;
    m.provenance = vars.at(Variable::Precipitation)->provenance;
    m.freshwater = watersupply::freshwater(on_grid(*vars.at(Variable::Precipitation)),
                                           on_grid(*vars.at(Variable::Evapotranspiration)));
    if (auto it = vars.find(Variable::AirTemperature); it != vars.end()) m.air = on_grid(*it->second);
    if (auto it = vars.find(Variable::LongwaveClearSky); it != vars.end()) m.longwave = on_grid(*it->second);
    if (auto it = vars.find(Variable::ShortwaveClearSky); it != vars.end()) m.shortwave = on_grid(*it->second);
    ens.spec.members.push_back({key.first, key.second});
    ens.members.push_back(std::move(m));
  }
  ens.spec.validate();
  return ens;
}

// ---------------------------------------------------------------------------
// Water availability

struct CountyWaaci {
  std::string fips;
  bool excluded = false;  // centroid outside the climate grid
  std::map<std::pair<WindowLabel, std::string>, watersupply::WaaciRecord> by_window_stat;
  std::map<int, std::vector<double>> yearly_member_waaci;  // year -> per member
};

struct WaaciResult {
  std::vector<demography::CountyRecord> counties;  // prepared, input order
  std::vector<watersupply::WaaciRecord> records;   // window, statistic, fips order
  std::vector<std::string> excluded;
  std::vector<std::string> member_ids;
  std::vector<std::map<int, std::map<std::string, double>>> member_yearly;  // [member][year][fips]
  int first_year = 0, last_year = 0;
};

/// Last calendar year fully covered by every member.
inline int last_complete_year(const Ensemble& ens) {
  int last = std::numeric_limits<int>::max();
  for (const auto& m : ens.members) {
    const auto& t = m.freshwater.times;
    YearMonth end = t.back();
    last = std::min(last, end.month == 12 ? end.year : end.year - 1);
  }
  return last;
}

inline WaaciResult compute_waaci(const PipelineConfig& cfg, const std::vector<demography::CountyRecord>& input,
                                 const Ensemble& ens) {
  WaaciResult res;
  std::vector<int> targets;
  for (auto w : cfg.windows) targets.push_back(window_of(w).center_year());
  res.counties = input;
  for (auto& c : res.counties) demography::prepare_county(c, targets);
  for (const auto& m : ens.members) res.member_ids.push_back(m.id());
  res.first_year = demography::kBaseYear;
  res.last_year = last_complete_year(ens);

  auto per_county = parallel_map<CountyWaaci>(res.counties.size(), cfg.worker_count(), [&](std::size_t k) {
    const auto& c = res.counties[k];
    CountyWaaci out;
    out.fips = c.fips;
    if (!ens.grid.contains(c.lat, c.lon)) {
      out.excluded = true;
      return out;
    }
    std::vector<MonthlySeries> series;
    for (const auto& m : ens.members) series.push_back(geogrid::series_at_point(m.freshwater, c.lat, c.lon));
    for (auto w : cfg.windows) {
      auto window = window_of(w);
      std::vector<double> supply;
      for (const auto& s : series)
        supply.push_back(watersupply::to_volume(watersupply::climatology(s, window), c.area_km2));
      double demand = watersupply::demand_for(demography::population_at(c, window.center_year()), c.pop2010,
                                              cfg.demand_mode, cfg.per_capita_m3);
      for (auto stat : cfg.statistics) {
        watersupply::WaaciRecord r;
        r.fips = c.fips;
        r.window = w;
        r.scenario = std::string(ensemble::to_string(cfg.scenario));
        r.statistic = std::string(ensemble::to_string(stat));
        r.supply_mgal = ensemble::reduce(stat, supply);
        r.demand_mgal = demand;
        r.waaci_mgal = watersupply::waaci(r.supply_mgal, r.demand_mgal);
        out.by_window_stat[{w, r.statistic}] = r;
      }
    }
    for (int y = res.first_year; y <= res.last_year; ++y) {
      double demand = watersupply::demand_for(demography::population_at(c, y), c.pop2010, cfg.demand_mode,
                                              cfg.per_capita_m3);
      auto& row = out.yearly_member_waaci[y];
      for (const auto& s : series) {
        int first = YearMonth{y, 1}.index();
        double depth = 0.0;
        for (int mth = first; mth < first + 12; ++mth) {
          if (!s.covers(mth)) throw Error(ErrorCode::Coverage, "watersupply", "member series does not cover year");
          depth += s.at_index(mth);
        }
        row.push_back(watersupply::waaci(watersupply::to_volume(depth, c.area_km2), demand));
      }
    }
    return out;
  });

  res.member_yearly.resize(ens.members.size());
  for (const auto& cw : per_county) {
    if (cw.excluded) {
      res.excluded.push_back(cw.fips);
      continue;
    }
    for (const auto& [y, vals] : cw.yearly_member_waaci)
      for (std::size_t m = 0; m < vals.size(); ++m) res.member_yearly[m][y][cw.fips] = vals[m];
  }
  std::sort(res.excluded.begin(), res.excluded.end());
  for (auto w : cfg.windows)
    for (auto stat : cfg.statistics) {
      std::vector<watersupply::WaaciRecord> block;
      for (const auto& cw : per_county)
        if (!cw.excluded) block.push_back(cw.by_window_stat.at({w, std::string(ensemble::to_string(stat))}));
      std::sort(block.begin(), block.end(), [](const auto& a, const auto& b) { return a.fips < b.fips; });
      res.records.insert(res.records.end(), block.begin(), block.end());
    }
  return res;
}

// ---------------------------------------------------------------------------
// Stream temperature

struct GaugeOutcome {
  std::string gauge_id;
  std::optional<streamtemp::TrendResult> trend;
  std::string trend_note;  // reason when no trend
  std::optional<streamtemp::GaugeModel> model;
  std::string model_note;  // reason when no model
  std::vector<streamtemp::WindowProjection> projections;
};

namespace detail {
/// Month-by-month ensemble median of a variable sampled at a point, over
/// the months every member covers.
inline std::optional<MonthlySeries> median_series(const Ensemble& ens, double lat, double lon,
                                                  std::optional<geogrid::GriddedField> MemberClimate::*field) {
  std::vector<MonthlySeries> s;
  for (const auto& m : ens.members)
    if ((m.*field)) s.push_back(geogrid::series_at_point(*(m.*field), lat, lon));
  if (s.empty()) return std::nullopt;
  int first = s.front().first_index(), end = s.front().end_index();
  for (const auto& x : s) {
    first = std::max(first, x.first_index());
    end = std::min(end, x.end_index());
  }
  if (end <= first) return std::nullopt;
  MonthlySeries out{YearMonth::from_index(first), {}};
  std::vector<double> v(s.size());
  for (int t = first; t < end; ++t) {
    for (std::size_t k = 0; k < s.size(); ++k) v[k] = s[k].at_index(t);
    out.values.push_back(ensemble::mme_median(v));
  }
  return out;
}
}  // namespace detail

inline GaugeOutcome analyze_gauge(const PipelineConfig& cfg, const streamtemp::GaugeSeries& g, const Ensemble& ens,
                                  bool with_model = true) {
  GaugeOutcome out;
  out.gauge_id = g.gauge_id;
  try {
    out.trend = streamtemp::gauge_trend(g, cfg.alpha);
    if (!out.trend) out.trend_note = "fewer than 7 years of record";
  } catch (const Error& e) {
    out.trend_note = e.what();
  }
  if (!with_model) return out;
  if (!ens.grid.contains(g.lat, g.lon)) {
    out.model_note = "gauge outside climate grid";
    return out;
  }
  auto spec = streamtemp::predictor_model(cfg.predictor_model);
  streamtemp::PredictorInputs in;
  auto air = detail::median_series(ens, g.lat, g.lon, &MemberClimate::air);
  if (!air) {
    out.model_note = "no air temperature predictor";
    return out;
  }
  in.air = std::move(*air);
  in.longwave = detail::median_series(ens, g.lat, g.lon, &MemberClimate::longwave);
  in.shortwave = detail::median_series(ens, g.lat, g.lon, &MemberClimate::shortwave);
  try {
    out.model = streamtemp::fit_gauge_model(g, in, spec);
    for (auto w : cfg.windows) out.projections.push_back(streamtemp::project_window(*out.model, in, window_of(w)));
  } catch (const Error& e) {
    out.model.reset();
    out.projections.clear();
    out.model_note = e.what();
  }
  return out;
}

inline std::vector<GaugeOutcome> analyze_gauges(const PipelineConfig& cfg,
                                                const std::vector<streamtemp::GaugeSeries>& gauges,
                                                const Ensemble& ens, bool with_model = true) {
  return parallel_map<GaugeOutcome>(gauges.size(), cfg.worker_count(),
                                    [&](std::size_t i) { return analyze_gauge(cfg, gauges[i], ens, with_model); });
}

// ---------------------------------------------------------------------------
// Risk

struct PlantCapacityRow {
  std::string plant_id;
  WindowLabel window;
  std::string gauge_id;  // empty when no gauge in range
  double stream_temp_c = 0.0;
  double t_max_c = 0.0;
  std::optional<double> withdrawal_m3s;  // nullopt on shutdown or without gauge
  std::optional<double> usable_mw;
  std::string status;  // ok | shutdown | no_gauge
};

/// Window -> gauge -> bias-corrected projected maximum.
using ProjectionTable = std::map<WindowLabel, std::map<std::string, double>>;

inline ProjectionTable projection_table(const std::vector<GaugeOutcome>& gauges) {
  ProjectionTable t;
  for (const auto& g : gauges)
    for (const auto& p : g.projections) t[p.window][g.gauge_id] = p.max_temp_c;
  return t;
}

inline thermal::StateThresholds load_thresholds(const PipelineConfig& cfg, const io::Dataset& d) {
  if (cfg.thresholds_path) return thermal::StateThresholds::from_csv(cfg.thresholds_path->string());
  if (d.thresholds) return *d.thresholds;
  return thermal::StateThresholds::standard();
}

inline std::vector<risk::GaugeSite> gauge_sites(const std::vector<streamtemp::GaugeSeries>& gauges) {
  std::vector<risk::GaugeSite> out;
  for (const auto& g : gauges) out.push_back({g.gauge_id, g.lat, g.lon, g.fips, g.state});
  return out;
}

inline std::map<std::string, risk::CountySite> county_sites(const std::vector<demography::CountyRecord>& counties) {
  std::map<std::string, risk::CountySite> out;
  for (const auto& c : counties) out[c.fips] = {c.fips, c.state, c.label(), c.lat, c.lon};
  return out;
}

struct RiskResult {
  std::vector<risk::RiskReport> reports;  // window-major, then statistic
  std::vector<PlantCapacityRow> plant_capacity;
  std::vector<risk::TrendPoint> trend;
};

inline RiskResult compute_risk(const PipelineConfig& cfg, const io::Dataset& d,
                               const std::vector<watersupply::WaaciRecord>& waaci, const ProjectionTable& proj,
                               const std::vector<std::map<int, std::map<std::string, double>>>& member_yearly) {
  RiskResult res;
  auto thresholds = load_thresholds(cfg, d);
  auto sites = gauge_sites(d.gauges);
  auto counties = county_sites(d.counties);

  struct Job {
    WindowLabel window;
    std::string statistic;
  };
  std::vector<Job> jobs;
  for (auto w : cfg.windows)
    for (auto s : cfg.statistics) jobs.push_back({w, std::string(ensemble::to_string(s))});

  res.reports = parallel_map<risk::RiskReport>(jobs.size(), cfg.worker_count(), [&](std::size_t i) {
    risk::ReportInputs in;
    in.window = jobs[i].window;
    in.scenario = std::string(ensemble::to_string(cfg.scenario));
    in.statistic = jobs[i].statistic;
    for (const auto& r : waaci)
      if (r.window == in.window && r.statistic == in.statistic) in.waaci_by_fips[r.fips] = r.waaci_mgal;
    if (auto it = proj.find(in.window); it != proj.end()) in.gauge_max_c = it->second;
    in.gauges = sites;
    in.counties = counties;
    in.plants = d.plants;
    in.thresholds = thresholds;
    in.gauge_radius_km = cfg.gauge_radius_km;
    in.mode = cfg.aggregation;
    in.default_cf = cfg.capacity_factor;
    return risk::assemble_report(in);
  });

  for (auto w : cfg.windows) {
    std::vector<risk::GaugeSite> projected;
    const std::map<std::string, double>* maxima = nullptr;
    if (auto it = proj.find(w); it != proj.end()) maxima = &it->second;
    for (const auto& s : sites)
      if (maxima && maxima->count(s.gauge_id)) projected.push_back(s);
    for (const auto& p : d.plants) {
      if (!p.wet_cooled()) continue;
      PlantCapacityRow row;
      row.plant_id = p.plant_id;
      row.window = w;
      auto spec = p.thermal;
      if (!p.t_max_from_inventory) spec.t_max_c = thresholds.threshold(p.state);
      row.t_max_c = spec.t_max_c;
      auto gid = risk::nearest_gauge(p, projected, cfg.gauge_radius_km);
      if (!gid) {
        row.status = "no_gauge";
        res.plant_capacity.push_back(row);
        continue;
      }
      row.gauge_id = *gid;
      row.stream_temp_c = maxima->at(*gid);
      double q_avail = p.streamflow_m3s.value_or(std::numeric_limits<double>::infinity());
      bool once = p.cooling == thermal::Cooling::OnceThrough;
      double usable_w = once ? thermal::once_through_capacity(spec, row.stream_temp_c, q_avail)
                             : thermal::recirc_capacity(spec, row.stream_temp_c, q_avail);
      row.usable_mw = usable_w / 1e6;
      try {
        row.withdrawal_m3s = once ? thermal::once_through_withdrawal(spec, row.stream_temp_c)
                                  : thermal::recirc_withdrawal(spec, row.stream_temp_c);
        row.status = "ok";
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ThermalShutdown) throw;
        row.status = "shutdown";
      }
      res.plant_capacity.push_back(row);
    }
  }
  if (!member_yearly.empty()) res.trend = risk::risk_trend(member_yearly, d.plants, cfg.capacity_factor);
  return res;
}

// ---------------------------------------------------------------------------

struct RunResult {
  Ensemble ensemble;
  WaaciResult waaci;
  std::vector<GaugeOutcome> gauges;
  RiskResult risk;
  std::optional<double> national_diff_pct;
  int national_year = 0;
  std::size_t gauges_without_trend = 0;
  std::size_t gauges_without_model = 0;
};

/// Fails with a validation error listing every hard problem in the dataset.
inline void require_valid(const fs::path& dir) {
  auto rep = io::validate_dataset(dir);
  if (!rep.ok()) throw Error(ErrorCode::Validation, "cli", "dataset failed validation:\n" + rep.text());
}

inline std::optional<std::pair<int, double>> national_comparison(const WaaciResult& w,
                                                                 const std::map<int, double>& national) {
  for (auto it = national.rbegin(); it != national.rend(); ++it) {
    if (it->first < demography::kBaseYear) continue;
    std::vector<double> totals;
    for (const auto& c : w.counties) totals.push_back(demography::population_at(c, it->first));
    return std::pair{it->first, demography::national_check(totals, it->second)};
  }
  return std::nullopt;
}

inline RunResult run_pipeline(const PipelineConfig& cfg, const io::Dataset& d) {
  cfg.validate();
  RunResult r;
  r.ensemble = assemble_ensemble(d.fields, cfg.scenario);
  r.waaci = compute_waaci(cfg, d.counties, r.ensemble);
  r.gauges = analyze_gauges(cfg, d.gauges, r.ensemble);
  for (const auto& g : r.gauges) {
    r.gauges_without_trend += !g.trend.has_value();
    r.gauges_without_model += !g.model.has_value();
  }
  r.risk = compute_risk(cfg, d, r.waaci.records, projection_table(r.gauges), r.waaci.member_yearly);
  if (auto n = national_comparison(r.waaci, d.national)) {
    r.national_year = n->first;
    r.national_diff_pct = n->second;
  }
  return r;
}

}  // namespace pprisk::pipeline
