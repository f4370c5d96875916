#pragma once

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pprisk/calendar.hpp"
#include "pprisk/csv.hpp"
#include "pprisk/error.hpp"
#include "pprisk/pipeline.hpp"

namespace pprisk::io {

namespace fs = std::filesystem;

inline constexpr const char* kWaaciOut = "waaci.csv";
inline constexpr const char* kWaaciChangeOut = "waaci_change.csv";
inline constexpr const char* kMemberWaaciOut = "waaci_members.csv";
inline constexpr const char* kPopulationOut = "population.csv";
inline constexpr const char* kNationalCheckOut = "national_check.csv";
inline constexpr const char* kTrendOut = "trend.csv";
inline constexpr const char* kValidationOut = "validation.csv";
inline constexpr const char* kProjectionOut = "projection.csv";
inline constexpr const char* kPlantCapacityOut = "plant_capacity.csv";
inline constexpr const char* kExceedanceOut = "exceedance.csv";
inline constexpr const char* kSummaryOut = "risk_summary.json";
inline constexpr const char* kRiskTrendOut = "risk_trend.csv";
inline constexpr const char* kRiskTrendSvgOut = "risk_trend.svg";

/// Shortest round-trip decimal; -0 prints as 0 so reruns cannot differ in sign of zero.
inline std::string num(double v) {
  if (v == 0.0) return "0";
  return fmt::format("{}", v);
}
inline std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }
inline std::string flag(bool b) { return b ? "1" : "0"; }
inline double json_num(double v) { return v == 0.0 ? 0.0 : v; }

inline std::string risk_stem(WindowLabel w, std::string_view statistic) {
  return fmt::format("risk_{}_{}", to_string(w), statistic);
}

inline void save_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cli", "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cli", "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Water availability

inline std::string waaci_csv(const std::vector<watersupply::WaaciRecord>& records) {
  csv::Writer w({"fips", "window", "scenario", "statistic", "supply_mgal_yr", "demand_mgal_yr", "waaci_mgal_yr",
                 "stressed"});
  for (const auto& r : records)
    w.add({r.fips, std::string(to_string(r.window)), r.scenario, r.statistic, num(r.supply_mgal), num(r.demand_mgal),
           num(r.waaci_mgal), flag(r.stressed())});
  return w.str();
}

/// Change against the 2010s value of the same county and statistic; empty
/// when the baseline window was not computed.
inline std::string waaci_change_csv(const std::vector<watersupply::WaaciRecord>& records) {
  std::map<std::pair<std::string, std::string>, const watersupply::WaaciRecord*> base;
  for (const auto& r : records)
    if (r.window == WindowLabel::W2010s) base[{r.fips, r.statistic}] = &r;
  csv::Writer w({"fips", "window", "scenario", "statistic", "waaci_mgal_yr", "baseline_mgal_yr", "change_mgal_yr",
                 "significant_dry"});
  for (const auto& r : records) {
    auto it = base.find({r.fips, r.statistic});
    if (it == base.end()) continue;
    w.add({r.fips, std::string(to_string(r.window)), r.scenario, r.statistic, num(r.waaci_mgal),
           num(it->second->waaci_mgal), num(watersupply::waaci_change(r, *it->second)),
           flag(watersupply::is_significant_dry(r.waaci_mgal))});
  }
  return w.str();
}

inline std::string member_waaci_csv(const pipeline::WaaciResult& res) {
  csv::Writer w({"member", "year", "fips", "waaci_mgal_yr"});
  for (std::size_t m = 0; m < res.member_yearly.size(); ++m)
    for (const auto& [year, by_fips] : res.member_yearly[m])
      for (const auto& [fips, v] : by_fips) w.add({res.member_ids[m], std::to_string(year), fips, num(v)});
  return w.str();
}

inline std::string population_csv(const std::vector<demography::CountyRecord>& counties) {
  csv::Writer w({"fips", "pop2000", "pop2010", "growth_rate", "rate_undefined", "year", "population"});
  for (const auto& c : counties)
    for (const auto& [year, p] : c.projections)
      w.add({c.fips, num(c.pop2000), num(c.pop2010), num(c.growth_rate), flag(c.rate_undefined),
             std::to_string(year), num(p)});
  return w.str();
}

inline std::string national_check_csv(int year, double diff_pct) {
  csv::Writer w({"year", "difference_pct"});
  w.add({std::to_string(year), num(diff_pct)});
  return w.str();
}

// ---------------------------------------------------------------------------
// Stream temperature

inline std::string trend_csv(const std::vector<pipeline::GaugeOutcome>& gauges) {
  csv::Writer w({"gauge_id", "S", "Z", "p", "direction", "significant"});
  for (const auto& g : gauges)
    if (g.trend)
      w.add({g.gauge_id, num(g.trend->s), num(g.trend->z), num(g.trend->p),
             std::string(streamtemp::to_string(g.trend->direction)), flag(g.trend->significant)});
  return w.str();
}

inline std::string validation_csv(const std::vector<pipeline::GaugeOutcome>& gauges) {
  csv::Writer w({"gauge_id", "n_train", "n_test", "train_nse", "train_r", "test_nse", "test_r", "bias_c", "sigma",
                 "gamma", "note"});
  for (const auto& g : gauges) {
    if (!g.model) {
      w.add({g.gauge_id, "", "", "", "", "", "", "", "", "", g.model_note});
      continue;
    }
    const auto& m = *g.model;
    w.add({g.gauge_id, std::to_string(m.n_train), std::to_string(m.n_test), num(m.train_nse), num(m.train_r),
           num(m.test_nse), num(m.test_r), num(m.bias), num(m.hyper.sigma), num(m.hyper.gamma), ""});
  }
  return w.str();
}

inline std::string projection_csv(const std::vector<pipeline::GaugeOutcome>& gauges) {
  csv::Writer w({"gauge_id", "window", "max_temp_c", "bias_c"});
  for (const auto& g : gauges)
    for (const auto& p : g.projections)
      w.add({g.gauge_id, std::string(to_string(p.window)), num(p.max_temp_c), num(p.bias_c)});
  return w.str();
}

// ---------------------------------------------------------------------------
// Risk

inline std::string risk_csv(const risk::RiskReport& rep) {
  csv::Writer w({"fips", "state", "name", "lat", "lon", "window", "scenario", "statistic", "waaci_mgal_yr",
                 "water_scarce", "temp_stressed", "no_gauge", "significant_dry", "wet_capacity_quad",
                 "capacity_at_risk_quad"});
  for (const auto& r : rep.rows)
    w.add({r.fips, r.state, r.name, num(r.lat), num(r.lon), std::string(to_string(rep.window)), rep.scenario,
           rep.statistic, num(r.waaci_mgal), flag(r.flags.water_scarce), flag(r.flags.temp_stressed),
           flag(r.flags.no_gauge), flag(watersupply::is_significant_dry(r.waaci_mgal)), num(r.wet_capacity_quad),
           num(r.capacity_at_risk_quad)});
  return w.str();
}

inline std::string risk_geojson(const risk::RiskReport& rep) {
  using nlohmann::ordered_json;
  ordered_json features = ordered_json::array();
  for (const auto& r : rep.rows) {
    ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"}, {"coordinates", {json_num(r.lon), json_num(r.lat)}}};
    f["properties"] = {{"fips", r.fips},
                       {"state", r.state},
                       {"name", r.name},
                       {"waaci", json_num(r.waaci_mgal)},
                       {"flags",
                        {{"water_scarce", r.flags.water_scarce},
                         {"temp_stressed", r.flags.temp_stressed},
                         {"no_gauge", r.flags.no_gauge}}},
                       {"capacity_at_risk", json_num(r.capacity_at_risk_quad)}};
    features.push_back(std::move(f));
  }
  ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["properties"] = {{"window", to_string(rep.window)},
                       {"scenario", rep.scenario},
                       {"statistic", rep.statistic},
                       {"aggregation", risk::to_string(rep.mode)}};
  doc["features"] = std::move(features);
  return doc.dump(1) + "\n";
}

inline std::string exceedance_csv(const std::vector<risk::RiskReport>& reports) {
  csv::Writer w({"window", "statistic", "state", "county", "fips"});
  for (const auto& rep : reports)
    for (const auto& e : rep.exceed_counties) w.add({std::string(to_string(rep.window)), rep.statistic, e.state, e.county, e.fips});
  return w.str();
}

inline std::string plant_capacity_csv(const std::vector<pipeline::PlantCapacityRow>& rows) {
  csv::Writer w({"plant_id", "window", "gauge_id", "stream_temp_c", "t_max_c", "withdrawal_m3s", "usable_mw",
                 "status"});
  for (const auto& r : rows)
    w.add({r.plant_id, std::string(to_string(r.window)), r.gauge_id, r.gauge_id.empty() ? "" : num(r.stream_temp_c),
           num(r.t_max_c), num(r.withdrawal_m3s), num(r.usable_mw), r.status});
  return w.str();
}

inline std::string risk_trend_csv(const std::vector<risk::TrendPoint>& trend) {
  csv::Writer w({"year", "mean_quad", "sd_quad", "lower_quad", "upper_quad", "members", "single_member"});
  for (const auto& p : trend)
    w.add({std::to_string(p.year), num(p.mean_quad), num(p.sd_quad), num(p.mean_quad - p.sd_quad),
           num(p.mean_quad + p.sd_quad), std::to_string(p.members), flag(p.single_member)});
  return w.str();
}

/// Self-contained line chart of the member-mean series with a +/-1 sd band.
inline std::string risk_trend_svg(const std::vector<risk::TrendPoint>& trend, std::string_view title) {
  constexpr double W = 720, H = 400, L = 70, R = 20, T = 40, B = 50;
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
      W, H, W, H, W / 2, title);
  if (trend.empty()) return s + "<text x=\"360\" y=\"200\" text-anchor=\"middle\">no data</text>\n</svg>\n";
  double y0 = trend.front().year, y1 = trend.back().year;
  double lo = 0.0, hi = 0.0;
  for (const auto& p : trend) {
    lo = std::min(lo, p.mean_quad - p.sd_quad);
    hi = std::max(hi, p.mean_quad + p.sd_quad);
  }
  if (hi - lo <= 0) hi = lo + 1.0;
  hi += 0.05 * (hi - lo);
  auto sx = [&](double year) { return y1 > y0 ? L + (year - y0) / (y1 - y0) * (W - L - R) : L + (W - L - R) / 2; };
  auto sy = [&](double v) { return T + (hi - v) / (hi - lo) * (H - T - B); };
  auto pt = [](double x, double y) { return fmt::format("{:.2f},{:.2f}", x, y); };

  std::string band, line;
  for (const auto& p : trend) band += pt(sx(p.year), sy(p.mean_quad + p.sd_quad)) + " ";
  for (auto it = trend.rbegin(); it != trend.rend(); ++it) band += pt(sx(it->year), sy(it->mean_quad - it->sd_quad)) + " ";
  for (const auto& p : trend) line += pt(sx(p.year), sy(p.mean_quad)) + " ";
  band.pop_back();
  line.pop_back();

  s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", L, H - B, W - R, H - B);
  s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", L, T, L, H - B);
  for (int k = 0; k <= 4; ++k) {
    double v = lo + (hi - lo) * k / 4.0;
    s += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>\n", L - 6, sy(v) + 4, v);
  }
  int step = std::max(1, static_cast<int>((y1 - y0) / 8) + 1);
  for (int y = static_cast<int>(y0); y <= static_cast<int>(y1); y += step)
    s += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", sx(y), H - B + 18, y);
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">year</text>\n", (L + W - R) / 2, H - 10);
  s += fmt::format("<text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">"
                   "capacity at risk (quad/yr)</text>\n",
                   (T + H - B) / 2, (T + H - B) / 2);
  s += "<polygon points=\"" + band + "\" fill=\"#9ecae1\" fill-opacity=\"0.6\" stroke=\"none\"/>\n";
  s += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\"/>\n";
  s += "</svg>\n";
  return s;
}

struct SummaryContext {
  const pipeline::PipelineConfig* config = nullptr;
  std::vector<std::string> members;
  std::vector<std::string> excluded_counties;
  std::size_t regridded_fields = 0;
  std::vector<std::pair<std::string, std::string>> gauges_without_projection;  // id, reason
};

inline std::string summary_json(const SummaryContext& ctx, const pipeline::RiskResult& risk) {
  using nlohmann::ordered_json;
  const auto& cfg = *ctx.config;
  ordered_json doc;
  doc["scenario"] = ensemble::to_string(cfg.scenario);
  doc["aggregation"] = risk::to_string(cfg.aggregation);
  doc["members"] = ctx.members;
  doc["regridded_fields"] = ctx.regridded_fields;
  doc["excluded_counties"] = ctx.excluded_counties;
  doc["gauge_radius_km"] = cfg.gauge_radius_km;
  doc["capacity_factor"] = {{"default", cfg.capacity_factor},
                            {"placeholder", true},
                            {"note", "applied to wet-cooled plants lacking annual generation and capacity factor"}};
  doc["sigma_band"] = "population standard deviation of yearly at-risk capacity across ensemble members";
  ordered_json reports = ordered_json::array();
  for (const auto& rep : risk.reports) {
    std::size_t hot = 0;
    ordered_json exceed = ordered_json::array();
    for (const auto& r : rep.rows) hot += r.flags.temp_stressed;
    for (const auto& e : rep.exceed_counties) exceed.push_back({{"state", e.state}, {"county", e.county}, {"fips", e.fips}});
    reports.push_back({{"window", to_string(rep.window)},
                       {"statistic", rep.statistic},
                       {"counties", rep.rows.size()},
                       {"scarce_county_count", rep.scarce_county_count},
                       {"temp_stressed_county_count", hot},
                       {"exceed_counties", exceed},
                       {"total_quads_at_risk", json_num(rep.total_quads())},
                       {"total_quads_disjunctive", json_num(rep.total_quads_disjunctive)},
                       {"total_quads_conjunctive", json_num(rep.total_quads_conjunctive)},
                       {"plants_using_default_cf", rep.plants_using_default_cf}});
  }
  doc["reports"] = std::move(reports);
  ordered_json skipped = ordered_json::array();
  for (const auto& [id, why] : ctx.gauges_without_projection) skipped.push_back({{"gauge_id", id}, {"reason", why}});
  doc["gauges_without_projection"] = std::move(skipped);
  return doc.dump(1) + "\n";
}

// ---------------------------------------------------------------------------
// Step outputs

inline void write_waaci_outputs(const fs::path& out, const pipeline::WaaciResult& res) {
  fs::create_directories(out);
  save_text(out / kWaaciOut, waaci_csv(res.records));
  save_text(out / kWaaciChangeOut, waaci_change_csv(res.records));
  save_text(out / kMemberWaaciOut, member_waaci_csv(res));
  save_text(out / kPopulationOut, population_csv(res.counties));
}

inline void write_gauge_outputs(const fs::path& out, const std::vector<pipeline::GaugeOutcome>& gauges,
                                bool with_models) {
  fs::create_directories(out);
  save_text(out / kTrendOut, trend_csv(gauges));
  if (!with_models) return;
  save_text(out / kValidationOut, validation_csv(gauges));
  save_text(out / kProjectionOut, projection_csv(gauges));
}

inline void write_risk_outputs(const fs::path& out, const pipeline::RiskResult& risk, const SummaryContext& ctx) {
  fs::create_directories(out);
  for (const auto& rep : risk.reports) {
    auto stem = risk_stem(rep.window, rep.statistic);
    save_text(out / (stem + ".csv"), risk_csv(rep));
    save_text(out / (stem + ".geojson"), risk_geojson(rep));
  }
  save_text(out / kExceedanceOut, exceedance_csv(risk.reports));
  save_text(out / kPlantCapacityOut, plant_capacity_csv(risk.plant_capacity));
  save_text(out / kRiskTrendOut, risk_trend_csv(risk.trend));
  save_text(out / kRiskTrendSvgOut,
            risk_trend_svg(risk.trend, "Wet-cooled capacity in water-scarce counties, member mean +/- 1 sd"));
  save_text(out / kSummaryOut, summary_json(ctx, risk));
}

inline SummaryContext summary_context(const pipeline::PipelineConfig& cfg, const pipeline::RunResult& r) {
  SummaryContext ctx;
  ctx.config = &cfg;
  ctx.members = r.waaci.member_ids;
  ctx.excluded_counties = r.waaci.excluded;
  ctx.regridded_fields = r.ensemble.regridded;
  for (const auto& g : r.gauges)
    if (!g.model) ctx.gauges_without_projection.push_back({g.gauge_id, g.model_note});
  return ctx;
}

/// Every artifact of a full run.
inline void write_run(const fs::path& out, const pipeline::PipelineConfig& cfg, const pipeline::RunResult& r) {
  write_waaci_outputs(out, r.waaci);
  if (r.national_diff_pct) save_text(out / kNationalCheckOut, national_check_csv(r.national_year, *r.national_diff_pct));
  write_gauge_outputs(out, r.gauges, true);
  write_risk_outputs(out, r.risk, summary_context(cfg, r));
}

// ---------------------------------------------------------------------------
// Readers for the single-step risk command

namespace detail {
inline WindowLabel window_label(const csv::Row& r) {
  auto w = parse_window(csv::trim(r.str("window")));
  if (!w) r.fail("window", "unknown window label");
  return w->label;
}
}  // namespace detail

inline std::vector<watersupply::WaaciRecord> read_waaci(const fs::path& path) {
  auto t = csv::Table::read(path.string());
  t.require({"fips", "window", "scenario", "statistic", "supply_mgal_yr", "demand_mgal_yr", "waaci_mgal_yr"});
  std::vector<watersupply::WaaciRecord> out;
  for (const auto& r : t.rows()) {
    watersupply::WaaciRecord w;
    w.fips = normalize_fips(r.str("fips"));
    w.window = detail::window_label(r);
    w.scenario = std::string(csv::trim(r.str("scenario")));
    w.statistic = std::string(csv::trim(r.str("statistic")));
    w.supply_mgal = r.num("supply_mgal_yr");
    w.demand_mgal = r.num("demand_mgal_yr");
    w.waaci_mgal = r.num("waaci_mgal_yr");
    out.push_back(std::move(w));
  }
  return out;
}

inline pipeline::ProjectionTable read_projection(const fs::path& path) {
  auto t = csv::Table::read(path.string());
  t.require({"gauge_id", "window", "max_temp_c"});
  pipeline::ProjectionTable out;
  for (const auto& r : t.rows())
    out[detail::window_label(r)][std::string(csv::trim(r.str("gauge_id")))] = r.num("max_temp_c");
  return out;
}

/// Per-member yearly WAACI in file order of first appearance of each member.
inline std::vector<std::map<int, std::map<std::string, double>>> read_member_waaci(const fs::path& path) {
  auto t = csv::Table::read(path.string());
  t.require({"member", "year", "fips", "waaci_mgal_yr"});
  std::vector<std::map<int, std::map<std::string, double>>> out;
  std::map<std::string, std::size_t> slot;
  for (const auto& r : t.rows()) {
    std::string m(csv::trim(r.str("member")));
    auto [it, fresh] = slot.try_emplace(m, out.size());
    if (fresh) out.emplace_back();
    out[it->second][r.integer("year")][normalize_fips(r.str("fips"))] = r.num("waaci_mgal_yr");
  }
  return out;
}

}  // namespace pprisk::io
