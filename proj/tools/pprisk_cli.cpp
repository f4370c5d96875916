#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "pprisk/pprisk.hpp"

namespace fs = std::filesystem;
using namespace pprisk;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CliOptions {
  std::string data = ".";
  std::string out = "out";
  std::string scenario = "rcp85";
  std::vector<std::string> statistics{"median"};
  std::vector<std::string> windows{"2010s", "2020s", "2030s", "2040s"};
  double per_capita = watersupply::kDefaultPerCapitaM3;
  std::string demand_mode = "absolute";
  double alpha = 0.10;
  double gauge_radius = risk::kDefaultGaugeRadiusKm;
  std::string aggregation = "disjunctive";
  double capacity_factor = risk::kDefaultCapacityFactor;
  unsigned threads = 1;
  std::string thresholds;
  int predictor_model = 4;
  unsigned long long seed = 42;
  double gap_fraction = 0.08;
};

[[noreturn]] void bad_flag(const std::string& what) { throw Error(ErrorCode::Validation, "cli", what); }

pipeline::PipelineConfig to_config(const CliOptions& o) {
  pipeline::PipelineConfig c;
  c.data_dir = o.data;
  c.out_dir = o.out;
  auto sc = ensemble::parse_scenario(o.scenario);
  if (!sc) bad_flag("unknown scenario '" + o.scenario + "' (rcp26 | rcp85)");
  c.scenario = *sc;
  c.statistics.clear();
  for (const auto& s : o.statistics) {
    auto st = ensemble::parse_statistic(s);
    if (!st) bad_flag("unknown statistic '" + s + "' (median | min2 | p80)");
    if (std::find(c.statistics.begin(), c.statistics.end(), *st) == c.statistics.end()) c.statistics.push_back(*st);
  }
  c.windows.clear();
  for (const auto& w : o.windows) {
    auto win = parse_window(w);
    if (!win) bad_flag("unknown window '" + w + "' (2010s | 2020s | 2030s | 2040s)");
    if (std::find(c.windows.begin(), c.windows.end(), win->label) == c.windows.end()) c.windows.push_back(win->label);
  }
  std::sort(c.windows.begin(), c.windows.end());
  c.per_capita_m3 = o.per_capita;
  if (o.demand_mode == "absolute") c.demand_mode = watersupply::DemandMode::Absolute;
  else if (o.demand_mode == "change") c.demand_mode = watersupply::DemandMode::Change;
  else bad_flag("unknown demand mode '" + o.demand_mode + "' (absolute | change)");
  c.alpha = o.alpha;
  c.gauge_radius_km = o.gauge_radius;
  auto ag = risk::parse_aggregation(o.aggregation);
  if (!ag) bad_flag("unknown aggregation '" + o.aggregation + "' (disjunctive | conjunctive)");
  c.aggregation = *ag;
  c.capacity_factor = o.capacity_factor;
  c.threads = o.threads;
  if (!o.thresholds.empty()) c.thresholds_path = o.thresholds;
  c.predictor_model = o.predictor_model;
  c.validate();
  return c;
}

void add_data(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--data,-d", o.data, "Dataset directory")->capture_default_str();
}

void add_pipeline_flags(CLI::App* cmd, CliOptions& o) {
  add_data(cmd, o);
  cmd->add_option("--out,-o", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--scenario", o.scenario, "rcp26 | rcp85")->capture_default_str();
  cmd->add_option("--statistic", o.statistics, "Ensemble statistic: median | min2 | p80 (repeatable)")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--windows", o.windows, "Climatology windows, comma separated")->delimiter(',')->capture_default_str();
  cmd->add_option("--per-capita", o.per_capita, "Municipal demand, m3/capita/year")->capture_default_str();
  cmd->add_option("--demand-mode", o.demand_mode, "absolute | change")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Mann-Kendall significance level")->capture_default_str();
  cmd->add_option("--gauge-radius", o.gauge_radius, "Plant-gauge link radius, km")->capture_default_str();
  cmd->add_option("--aggregation", o.aggregation, "disjunctive | conjunctive")->capture_default_str();
  cmd->add_option("--capacity-factor", o.capacity_factor, "Placeholder capacity factor")->capture_default_str();
  cmd->add_option("--threads,-j", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--thresholds", o.thresholds, "State threshold CSV (state,threshold_c)");
  cmd->add_option("--predictor-model", o.predictor_model, "Stream-temperature predictor set 1..4")
      ->capture_default_str();
}

int cmd_validate(const CliOptions& o) {
  auto rep = io::validate_dataset(o.data);
  std::fputs(rep.text().c_str(), stdout);
  fmt::print("{} error(s), {} warning(s)\n", rep.errors(), rep.warnings());
  return rep.ok() ? kExitOk : kExitValidation;
}

int cmd_synth(const CliOptions& o) {
  synth::SynthOptions s;
  s.seed = o.seed;
  s.out_dir = o.out;
  s.gap_fraction = o.gap_fraction;
  auto truth = synth::synthesize(s);
  fmt::print("wrote synthetic dataset to {} ({} members, seed {})\n", o.out, truth.members.size(), o.seed);
  return kExitOk;
}

io::Dataset load_valid(const pipeline::PipelineConfig& cfg) {
  pipeline::require_valid(cfg.data_dir);
  return io::load_dataset(cfg.data_dir);
}

int cmd_run(const CliOptions& o) {
  auto cfg = to_config(o);
  auto start = std::chrono::steady_clock::now();
  auto d = load_valid(cfg);
  auto r = pipeline::run_pipeline(cfg, d);
  io::write_run(cfg.out_dir, cfg, r);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& rep : r.risk.reports)
    fmt::print("{} {}: {} scarce counties, {} exceed counties, {} quad/yr at risk ({})\n", to_string(rep.window),
               rep.statistic, rep.scarce_county_count, rep.exceed_counties.size(), io::num(rep.total_quads()),
               risk::to_string(rep.mode));
  if (!r.waaci.excluded.empty())
    fmt::print("{} counties outside the climate grid were excluded\n", r.waaci.excluded.size());
  fmt::print("artifacts written to {} in {:.2f} s\n", cfg.out_dir.string(), secs);
  return kExitOk;
}

int cmd_waaci(const CliOptions& o) {
  auto cfg = to_config(o);
  auto d = load_valid(cfg);
  auto ens = pipeline::assemble_ensemble(d.fields, cfg.scenario);
  auto w = pipeline::compute_waaci(cfg, d.counties, ens);
  io::write_waaci_outputs(cfg.out_dir, w);
  if (auto n = pipeline::national_comparison(w, d.national))
    io::save_text(cfg.out_dir / io::kNationalCheckOut, io::national_check_csv(n->first, n->second));
  fmt::print("{} WAACI records written to {}\n", w.records.size(), (cfg.out_dir / io::kWaaciOut).string());
  return kExitOk;
}

int cmd_trend(const CliOptions& o) {
  auto cfg = to_config(o);
  auto d = load_valid(cfg);
  auto g = pipeline::analyze_gauges(cfg, d.gauges, pipeline::Ensemble{}, false);
  io::write_gauge_outputs(cfg.out_dir, g, false);
  for (const auto& x : g)
    if (!x.trend) fmt::print("{}: no trend ({})\n", x.gauge_id, x.trend_note);
  return kExitOk;
}

int cmd_project(const CliOptions& o) {
  auto cfg = to_config(o);
  auto d = load_valid(cfg);
  auto ens = pipeline::assemble_ensemble(d.fields, cfg.scenario);
  auto g = pipeline::analyze_gauges(cfg, d.gauges, ens, true);
  io::write_gauge_outputs(cfg.out_dir, g, true);
  for (const auto& x : g)
    if (!x.model) fmt::print("{}: no projection ({})\n", x.gauge_id, x.model_note);
  return kExitOk;
}

/// Risk from previously written waaci and projection artifacts.
int cmd_risk(const CliOptions& o) {
  auto cfg = to_config(o);
  auto d = load_valid(cfg);
  for (const char* f : {io::kWaaciOut, io::kProjectionOut, io::kMemberWaaciOut})
    if (!fs::exists(cfg.out_dir / f))
      throw Error(ErrorCode::Validation, "cli",
                  fmt::format("{} not found in {}; run the waaci and project steps first", f, cfg.out_dir.string()));
  auto waaci = io::read_waaci(cfg.out_dir / io::kWaaciOut);
  auto proj = io::read_projection(cfg.out_dir / io::kProjectionOut);
  auto members = io::read_member_waaci(cfg.out_dir / io::kMemberWaaciOut);
  auto r = pipeline::compute_risk(cfg, d, waaci, proj, members);

  auto ens = pipeline::assemble_ensemble(d.fields, cfg.scenario);
  io::SummaryContext ctx;
  ctx.config = &cfg;
  for (const auto& m : ens.members) ctx.members.push_back(m.id());
  ctx.regridded_fields = ens.regridded;
  for (const auto& c : d.counties)
    if (!ens.grid.contains(c.lat, c.lon)) ctx.excluded_counties.push_back(c.fips);
  std::sort(ctx.excluded_counties.begin(), ctx.excluded_counties.end());
  if (fs::exists(cfg.out_dir / io::kValidationOut)) {
    auto t = csv::Table::read((cfg.out_dir / io::kValidationOut).string());
    for (const auto& row : t.rows())
      if (row.empty("n_train")) ctx.gauges_without_projection.push_back({std::string(row.str("gauge_id")), std::string(row.str("note"))});
  }
  io::write_risk_outputs(cfg.out_dir, r, ctx);
  for (const auto& rep : r.reports)
    fmt::print("{} {}: {} quad/yr at risk ({})\n", to_string(rep.window), rep.statistic, io::num(rep.total_quads()),
               risk::to_string(rep.mode));
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Validation:
    case ErrorCode::Parse:
    case ErrorCode::Referential: return kExitValidation;
    default: return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power production at risk: water availability, stream temperature and capacity-at-risk pipeline"};
  app.require_subcommand(1);
  CliOptions o;

  auto* validate = app.add_subcommand("validate", "Schema, range and referential checks of a dataset");
  add_data(validate, o);
  auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic mini-dataset and its expectation sidecar");
  synth_cmd->add_option("--out,-o", o.out, "Output directory")->required();
  synth_cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--gap-fraction", o.gap_fraction, "Share of gauge months left blank")->capture_default_str();
  auto* run = app.add_subcommand("run", "Full pipeline: WAACI, trends, projections, risk reports");
  auto* waaci = app.add_subcommand("waaci", "County water availability only");
  auto* trend = app.add_subcommand("trend", "Mann-Kendall trends of gauge records");
  auto* project = app.add_subcommand("project", "Fit stream-temperature models and project window maxima");
  auto* risk_cmd = app.add_subcommand("risk", "Risk reports from waaci and projection outputs in --out");
  for (auto* c : {run, waaci, trend, project, risk_cmd}) add_pipeline_flags(c, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*synth_cmd) return cmd_synth(o);
    if (*run) return cmd_run(o);
    if (*waaci) return cmd_waaci(o);
    if (*trend) return cmd_trend(o);
    if (*project) return cmd_project(o);
    if (*risk_cmd) return cmd_risk(o);
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}/{}]: {}\n", e.module(), to_string(e.code()), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
