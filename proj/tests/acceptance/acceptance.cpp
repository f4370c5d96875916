// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Oracles here are written independently of the library code paths
// they check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <random>

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <fmt/core.h>
#include <sys/wait.h>

#include "../unit/test_support.hpp"
#include "pprisk/pprisk.hpp"

using namespace pprisk;
namespace tu = pprisk::testutil;
namespace fs = std::filesystem;

namespace {

struct Failure {
  std::string why;
};

void check(bool ok, const std::string& why) {
  if (!ok) throw Failure{why};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Header-keyed rows of a plain (unquoted) CSV file.
std::vector<std::map<std::string, std::string>> read_plain_csv(const fs::path& p) {
  std::istringstream in(tu::slurp(p));
  std::string line;
  std::getline(in, line);
  auto header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    std::map<std::string, std::string> r;
    for (std::size_t i = 0; i < header.size(); ++i) r[header[i]] = i < cells.size() ? cells[i] : "";
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------- criterion 1

/// Straight-line WAACI: raw CSV parse, hand-rolled bilinear sampling of P
/// and E on each member's own grid, 5-year mean depth, volume, compound
/// population demand, order statistic over members.
struct RawMember {
  std::vector<double> lats, lons;  // sorted axes, longitudes in [0, 360)
  std::map<std::tuple<int, int, double, double>, double> p, e;
};

std::map<std::string, RawMember> read_raw_members(const fs::path& dir) {
  std::map<std::string, RawMember> m;
  for (auto [file, is_p] : {std::pair{"grid_pr.csv", true}, std::pair{"grid_evspsbl.csv", false}}) {
    for (const auto& r : read_plain_csv(dir / file)) {
      if (r.at("scenario") != "rcp85") continue;
      auto& mem = m[r.at("model") + "/" + r.at("run")];
      double lat = std::stod(r.at("lat")), lon = std::stod(r.at("lon"));
      if (lon < 0) lon += 360.0;
      auto key = std::tuple{std::stoi(r.at("year")), std::stoi(r.at("month")), lat, lon};
      (is_p ? mem.p : mem.e)[key] = std::stod(r.at("value"));
      if (is_p) {
        if (std::find(mem.lats.begin(), mem.lats.end(), lat) == mem.lats.end()) mem.lats.push_back(lat);
        if (std::find(mem.lons.begin(), mem.lons.end(), lon) == mem.lons.end()) mem.lons.push_back(lon);
      }
    }
  }
  for (auto& [id, mem] : m) {
    std::sort(mem.lats.begin(), mem.lats.end());
    std::sort(mem.lons.begin(), mem.lons.end());
  }
  return m;
}

std::optional<double> oracle_supply_mgal(const RawMember& m, double lat, double lon, int y0, int y1, double area) {
  if (lon < 0) lon += 360.0;
  if (lat < m.lats.front() || lat > m.lats.back() || lon < m.lons.front() || lon > m.lons.back()) return std::nullopt;
  std::size_t i = 0, j = 0;
  while (i + 2 < m.lats.size() && m.lats[i + 1] <= lat) ++i;
  while (j + 2 < m.lons.size() && m.lons[j + 1] <= lon) ++j;
  double fy = (lat - m.lats[i]) / (m.lats[i + 1] - m.lats[i]);
  double fx = (lon - m.lons[j]) / (m.lons[j + 1] - m.lons[j]);
  double total = 0.0;
  for (int y = y0; y <= y1; ++y)
    for (int mo = 1; mo <= 12; ++mo) {
      auto pe = [&](std::size_t a, std::size_t b) {
        auto k = std::tuple{y, mo, m.lats[a], m.lons[b]};
        return m.p.at(k) - m.e.at(k);
      };
      total += (1 - fy) * ((1 - fx) * pe(i, j) + fx * pe(i, j + 1)) + fy * ((1 - fx) * pe(i + 1, j) + fx * pe(i + 1, j + 1));
    }
  double depth_mm_per_year = total / (y1 - y0 + 1);
  return depth_mm_per_year * 1e-3 * area * 1e6 * 264.172 / 1e6;
}

double oracle_statistic(std::vector<double> v, const std::string& stat) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (stat == "median") return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  if (stat == "min2") return v[std::min<std::size_t>(1, n - 1)];
  return v[static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(n))) - 1];
}

std::string criterion1() {
  tu::ScratchDir dir("acc1");
  tu::make_dataset(dir.path());

  auto t0 = std::chrono::steady_clock::now();
  auto data = io::load_dataset(dir.path());
  pipeline::PipelineConfig cfg;
  cfg.statistics = {ensemble::Statistic::Median, ensemble::Statistic::Min2, ensemble::Statistic::P80};
  auto ens = pipeline::assemble_ensemble(data.fields, cfg.scenario);
  auto res = pipeline::compute_waaci(cfg, data.counties, ens);
  double elapsed = seconds_since(t0);

  auto members = read_raw_members(dir.path());
  check(members.size() == 6, "expected 6 raw members");
  const std::map<std::string, std::pair<int, int>> windows{
      {"2010s", {2008, 2012}}, {"2020s", {2018, 2022}}, {"2030s", {2028, 2032}}, {"2040s", {2038, 2042}}};

  std::size_t compared = 0;
  double worst = 0.0;
  std::set<std::string> oracle_excluded;
  for (const auto& c : read_plain_csv(dir.path() / "counties.csv")) {
    std::string fips = c.at("fips");
    double lat = std::stod(c.at("lat")), lon = std::stod(c.at("lon")), area = std::stod(c.at("area_km2"));
    double p00 = c.at("pop2000").empty() ? 0.0 : std::stod(c.at("pop2000")), p10 = std::stod(c.at("pop2010"));
    double rate = p00 > 0 ? std::pow(p10 / p00, 0.1) - 1.0 : 0.0;
    for (const auto& [w, yy] : windows) {
      std::vector<double> supply;
      for (const auto& [id, m] : members)
        if (auto s = oracle_supply_mgal(m, lat, lon, yy.first, yy.second, area)) supply.push_back(*s);
      if (supply.empty()) {
        oracle_excluded.insert(fips);
        continue;
      }
      int center = (yy.first + yy.second) / 2;
      double demand = p10 * std::pow(1.0 + rate, center - 2010) * 1700.0 * 264.172 / 1e6;
      for (const char* stat : {"median", "min2", "p80"}) {
        double want = oracle_statistic(supply, stat) - demand;
        auto it = std::find_if(res.records.begin(), res.records.end(), [&](const auto& r) {
          return r.fips == fips && to_string(r.window) == w && r.statistic == stat;
        });
        check(it != res.records.end(), "no record for " + fips + " " + w + " " + stat);
        double e = rel_err(it->waaci_mgal, want);
        worst = std::max(worst, e);
        check(e <= 1e-9, fmt::format("{} {} {}: {} vs oracle {}", fips, w, stat, it->waaci_mgal, want));
        ++compared;
      }
    }
  }
  check(std::set<std::string>(res.excluded.begin(), res.excluded.end()) == oracle_excluded,
        "excluded counties differ from oracle");
  check(compared == 14 * 4 * 3, fmt::format("compared {} records", compared));
  check(elapsed < 1.0, fmt::format("load and WAACI took {:.3f} s", elapsed));
  return fmt::format("{} records, max rel err {:.1e}, {:.3f} s", compared, worst, elapsed);
}

// ---------------------------------------------------------------- criterion 2

std::string criterion2() {
  using Hp = boost::multiprecision::cpp_dec_float_50;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pop(1e3, 1e7), rate(-0.05, 0.08);
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    double p10 = std::round(pop(rng)), r = rate(rng);
    int years = trial % 41;
    double got = demography::project_population(p10, r, years);
    Hp want = Hp(p10) * boost::multiprecision::pow(Hp(1) + Hp(r), years);
    double e = rel_err(got, want.convert_to<double>());
    worst = std::max(worst, e);
    check(e <= 1e-12, fmt::format("p={} r={} years={}: rel err {}", p10, r, years, e));
  }
  // Rate from the 2000-2010 decade carries pop2000 back to pop2010.
  for (int trial = 0; trial < 2000; ++trial) {
    double p00 = std::round(pop(rng)), p10 = std::round(p00 * (0.5 + std::uniform_real_distribution<double>(0, 1.5)(rng)));
    double r = demography::growth_rate(p00, p10);
    double back = demography::project_population(p00, r, 10);
    check(rel_err(back, p10) <= 1e-12, fmt::format("round trip {} -> {}", p10, back));
    check(std::round(back) == p10, fmt::format("round trip {} rounds to {}", p10, std::round(back)));
    check(demography::project_population(p10, r, 0) == p10, "zero horizon changes population");
  }
  return fmt::format("4000 cases, max rel err {:.1e}", worst);
}

// ---------------------------------------------------------------- criterion 3

std::string criterion3() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 100.0);
  for (int draw = 0; draw < 1000; ++draw) {
    std::vector<double> v(6);
    for (auto& x : v) x = n(rng);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double second_max = sorted[1];
    check(ensemble::mme_percentile(v, 80.0) == second_max, fmt::format("draw {}: p80 != 2nd max", draw));
    check(ensemble::reduce(ensemble::Statistic::P80, v) == second_max, fmt::format("draw {}: reduce p80", draw));
  }
  return "1000 draws exact";
}

// ---------------------------------------------------------------- criterion 4

std::string criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  const int n = 120, reps = 2000;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z(0.0, 1.0);

  int white_reject = 0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> x(n);
    for (auto& v : x) v = z(rng);
    white_reject += streamtemp::mk_trend(x, 0.10).significant;
  }
  double white_rate = static_cast<double>(white_reject) / reps;
  check(white_rate >= 0.07 && white_rate <= 0.13, fmt::format("white-noise rejection rate {}", white_rate));

  int corrected = 0, uncorrected = 0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> x(n);
    double prev = z(rng) / std::sqrt(1 - 0.36);
    for (auto& v : x) v = prev = 0.6 * prev + z(rng);
    auto t = streamtemp::mk_trend(x, 0.10);
    corrected += t.significant;
    uncorrected += t.p_uncorrected() < 0.10;
  }
  check(corrected < uncorrected, fmt::format("AR(1) corrected {} not below uncorrected {}", corrected, uncorrected));

  std::vector<double> mono(10);
  for (int i = 0; i < 10; ++i) mono[static_cast<std::size_t>(i)] = 0.5 * i * i + i;
  auto t = streamtemp::mk_trend(mono, 0.10);
  check(t.s == 45.0, fmt::format("monotone S = {}", t.s));
  check(t.p < 1e-3, fmt::format("monotone p = {}", t.p));

  double elapsed = seconds_since(t0);
  check(elapsed < 30.0, fmt::format("took {:.2f} s", elapsed));
  return fmt::format("white {:.4f}, AR(1) {} < {}, S=45 p={:.1e}, {:.2f} s", white_rate,
                     static_cast<double>(corrected) / reps, static_cast<double>(uncorrected) / reps, t.p, elapsed);
}

// ---------------------------------------------------------------- criterion 5

/// Dense Gauss-Jordan elimination with partial pivoting on the full bordered
/// system [[0, 1'], [1, K + I/gamma]] [b; a] = [0; y], long double.
std::vector<long double> dense_saddle_oracle(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double sigma,
                                             double gamma) {
  const std::size_t n = static_cast<std::size_t>(x.rows()), m = n + 1;
  std::vector<std::vector<long double>> a(m, std::vector<long double>(m + 1, 0.0L));
  for (std::size_t i = 0; i < n; ++i) {
    a[0][i + 1] = a[i + 1][0] = 1.0L;
    a[i + 1][m] = y(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < n; ++j) {
      long double d2 = 0;
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        long double d = static_cast<long double>(x(static_cast<Eigen::Index>(i), c)) - x(static_cast<Eigen::Index>(j), c);
        d2 += d * d;
      }
      a[i + 1][j + 1] = std::exp(-d2 / (2.0L * sigma * sigma)) + (i == j ? 1.0L / gamma : 0.0L);
    }
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      long double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<long double> sol(m);
  for (std::size_t r = 0; r < m; ++r) sol[r] = a[r][m] / a[r][r];
  return sol;
}

std::string criterion5() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);

  // 7 support points give the 8x8 bordered system.
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd x(7, 3);
    Eigen::VectorXd y(7);
    for (Eigen::Index i = 0; i < 7; ++i) {
      for (Eigen::Index c = 0; c < 3; ++c) x(i, c) = u(rng);
      y(i) = 5.0 * u(rng);
    }
    double sigma = trial % 2 ? 0.7 : 1.8, gamma = trial % 3 ? 20.0 : 0.8;
    auto m = streamtemp::lssvm_fit(x, y, sigma, gamma);
    auto want = dense_saddle_oracle(x, y, sigma, gamma);
    check(want.size() == 8, "oracle system is not 8x8");
    worst = std::max(worst, std::abs(m.bias - static_cast<double>(want[0])));
    for (Eigen::Index i = 0; i < 7; ++i)
      worst = std::max(worst, std::abs(m.alpha(i) - static_cast<double>(want[static_cast<std::size_t>(i + 1)])));
    check(worst <= 1e-8, fmt::format("trial {}: deviation {}", trial, worst));
  }

  // Noiseless smooth target, tuned on the first 150 rows, scored on 50 held out.
  const Eigen::Index n = 200;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = u(rng);
    x(i, 1) = u(rng);
    y(i) = std::sin(1.3 * x(i, 0)) + 0.5 * std::cos(0.8 * x(i, 1)) + 0.2 * x(i, 0) * x(i, 1);
  }
  Eigen::MatrixXd xtr = x.topRows(150), xte = x.bottomRows(50);
  Eigen::VectorXd ytr = y.head(150), yte = y.tail(50);
  auto scaling = streamtemp::FeatureScaling::fit(xtr);
  Eigen::MatrixXd str = scaling.apply(xtr);
  auto hp = streamtemp::tune_hyperparams(str, ytr);
  auto model = streamtemp::lssvm_fit(str, ytr, hp.sigma, hp.gamma, &scaling);
  auto pred = streamtemp::lssvm_predict(model, xte);
  double test_nse = streamtemp::nse(streamtemp::to_std(yte), streamtemp::to_std(pred));
  check(test_nse >= 0.95, fmt::format("test NSE {}", test_nse));

  Eigen::MatrixXd k = streamtemp::rbf_kernel(str, str, hp.sigma);
  double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  check(min_eig >= -1e-8, fmt::format("kernel min eigenvalue {}", min_eig));
  return fmt::format("8x8 max dev {:.1e}, test NSE {:.4f} (sigma {}, gamma {}), min eig {:.1e}", worst, test_nse,
                     hp.sigma, hp.gamma, min_eig);
}

// ---------------------------------------------------------------- criterion 6

std::string criterion6() {
  using streamtemp::nse;
  using streamtemp::pearson_r;
  std::vector<double> obs{3.1, 4.7, 2.2, 8.9, 5.0};
  check(nse(obs, obs) == 1.0, "perfect prediction NSE != 1");
  double mean = 0.0;
  for (double v : obs) mean += v / static_cast<double>(obs.size());
  check(nse(obs, std::vector<double>(obs.size(), mean)) == 0.0, "mean predictor NSE != 0");
  check(nse(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4}) == 0.5, "[1,2,3]/[1,2,4] NSE != 0.5");
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0.0, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(50), y(50);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = z(rng);
      y[i] = 2.0 * x[i] + 1.0;
    }
    worst = std::max(worst, std::abs(pearson_r(y, x) - 1.0));
  }
  check(worst <= 1e-12, fmt::format("affine r deviates by {}", worst));
  return fmt::format("NSE fixtures exact, max |r - 1| {:.1e}", worst);
}

// ---------------------------------------------------------------- criterion 7

std::string criterion7() {
  using namespace thermal;
  PlantThermalSpec s;
  s.capacity_w = 1e9;
  s.t_max_c = 32.2;

  for (double tw : {32.2, 32.5, 40.0}) {
    check(once_through_capacity(s, tw, 1e6) == 0.0, "once-through capacity not zero at shutdown");
    check(recirc_capacity(s, tw, 1e6) == 0.0, "recirculating capacity not zero at shutdown");
    bool threw = false;
    try {
      once_through_withdrawal(s, tw);
    } catch (const Error& e) {
      threw = e.code() == ErrorCode::ThermalShutdown;
    }
    check(threw, fmt::format("no thermal-shutdown error at {} degC", tw));
  }

  double q = once_through_withdrawal(s, 20.0);
  check(std::abs(q / 32.25 - 1.0) <= 1e-3, fmt::format("withdrawal {} m3/s", q));
  double p = once_through_capacity(s, 20.0, 20.0 / s.gamma);
  check(std::abs(p / 620.1e6 - 1.0) <= 1e-3, fmt::format("capacity {} MW", p / 1e6));

  PlantThermalSpec r = s;
  r.beta = 0.0;
  r.omega = r.epsilon = 1.0;
  for (double tw : {5.0, 18.0, 25.0, 31.0})
    for (double flow : {5.0, 50.0, 500.0}) {
      check(recirc_withdrawal(r, tw) == once_through_withdrawal(r, tw), "recirculating withdrawal differs");
      check(recirc_capacity(r, tw, flow) == once_through_capacity(r, tw, flow), "recirculating capacity differs");
    }

  double prev = -1.0;
  for (int i = 0; i < 100; ++i) {
    double tw = 0.0 + 32.0 * i / 100.0;
    double w = once_through_withdrawal(s, tw);
    check(w >= prev, fmt::format("withdrawal decreases at {} degC", tw));
    prev = w;
  }
  return fmt::format("q = {:.3f} m3/s, P = {:.2f} MW", q, p / 1e6);
}

// ---------------------------------------------------------------- criterion 8

std::string criterion8() {
  const std::vector<std::pair<std::string, double>> table{
      {"Indiana", 35.0},      {"Kentucky", 31.7}, {"Louisiana", 34.4}, {"North Carolina", 34.8},
      {"Pennsylvania", 30.5}, {"Virginia", 33.7}, {"Wisconsin", 31.7}};
  auto builtin = thermal::StateThresholds::standard();
  auto bundled = thermal::StateThresholds::from_csv(std::string(PPRISK_DATA_DIR) + "/state_thresholds.csv");
  for (const auto* t : {&builtin, &bundled}) {
    for (const auto& [state, c] : table) {
      check(t->threshold(state) == c, fmt::format("{} threshold {}", state, t->threshold(state)));
      check(thermal::wtsi(c, state, *t) == 0, state + ": boundary value flagged");
      check(thermal::wtsi(std::nextafter(c, 100.0), state, *t) == 1, state + ": value above limit not flagged");
    }
    check(t->threshold("Texas") == 32.2, "default threshold");
    check(t->listed().size() == 7, "listed state count");
    check(thermal::wtsi(32.2, "Ohio", *t) == 0, "default boundary flagged");
  }
  return "7 states plus default, built-in and bundled tables";
}

// ---------------------------------------------------------------- criterion 9

std::string criterion9() {
  MonthlySeries s{{2026, 1}, {}};
  for (int m = 0; m < 12 * 20; ++m) s.values.push_back(18.0 + 9.0 * std::sin(m * 0.5236) + 0.01 * m);
  for (auto label : {WindowLabel::W2030s, WindowLabel::W2040s}) {
    auto w = window_of(label);
    double raw = streamtemp::max_monthly(s, w);
    auto same = streamtemp::bias_correct(s, 0.0);
    check(same.values == s.values, "zero bias changes the series");
    for (double bias : {9.5, -1.9}) {
      double corrected = streamtemp::max_monthly(streamtemp::bias_correct(s, bias), w);
      check(corrected == raw - bias,
            fmt::format("{} bias {}: {} vs {}", to_string(label), bias, corrected, raw - bias));
    }
  }
  return "identity and +9.5/-1.9 shifts exact";
}

// --------------------------------------------------------------- criterion 10

int run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + PPRISK_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::set<std::string> flagged(const fs::path& csv_path, const std::function<bool(const std::map<std::string, std::string>&)>& pred) {
  std::set<std::string> out;
  for (const auto& r : read_plain_csv(csv_path))
    if (pred(r)) out.insert(r.at("fips"));
  return out;
}

std::string criterion10() {
  tu::ScratchDir data("acc10_data"), out1("acc10_a"), out2("acc10_b"), out3("acc10_c");
  const std::string stats = " --statistic median,min2,p80";

  auto t0 = std::chrono::steady_clock::now();
  check(run_cli("synth --out " + q(data.path())) == 0, "synth failed");
  check(run_cli("run --data " + q(data.path()) + " --out " + q(out1.path()) + stats) == 0, "run failed");
  double elapsed = seconds_since(t0);
  check(elapsed < 10.0, fmt::format("synth + run took {:.2f} s", elapsed));

  auto truth = synth::read_sidecar(data.path());
  std::size_t sets = 0;
  auto waaci_rows = read_plain_csv(out1.path() / "waaci.csv");
  for (const auto& [w, by_stat] : truth["scarce"].items())
    for (const auto& [stat, expected] : by_stat.items()) {
      std::set<std::string> want(expected.begin(), expected.end()), got;
      for (const auto& r : waaci_rows)
        if (r.at("window") == w && r.at("statistic") == stat && std::stod(r.at("waaci_mgal_yr")) < 0)
          got.insert(r.at("fips"));
      check(got == want, fmt::format("{} {}: stressed counties differ from sidecar", w, stat));
      auto risk_path = out1.path() / fmt::format("risk_{}_{}.csv", w, stat);
      auto dis = flagged(risk_path, [](const auto& r) { return r.at("water_scarce") == "1" || r.at("temp_stressed") == "1"; });
      const auto& dj = truth["stressed_disjunctive"][w][stat];
      check(dis == std::set<std::string>(dj.begin(), dj.end()), fmt::format("{} {}: disjunctive set", w, stat));
      sets += 2;
    }

  check(run_cli("run --data " + q(data.path()) + " --out " + q(out2.path()) + stats) == 0, "rerun failed");
  check(run_cli("run --data " + q(data.path()) + " --out " + q(out3.path()) + stats + " -j 0") == 0,
        "parallel run failed");
  auto a = tu::snapshot(out1.path());
  check(a == tu::snapshot(out2.path()), "rerun artifacts differ");
  check(a == tu::snapshot(out3.path()), "artifacts differ across parallelism");
  return fmt::format("{:.2f} s, {} sets match, {} artifacts identical", elapsed, sets, a.size());
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"WAACI oracle equivalence", criterion1}, {"population formulas", criterion2},
      {"ensemble p80 identity", criterion3},    {"Mann-Kendall calibration", criterion4},
      {"LS-SVM correctness", criterion5},       {"metrics fixtures", criterion6},
      {"thermal physics", criterion7},          {"WTSI table", criterion8},
      {"bias correction", criterion9},          {"end-to-end run", criterion10}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, fn] = criteria[i];
    try {
      auto detail = fn();
      fmt::print("PASS {:2} {}: {}\n", i + 1, name, detail);
    } catch (const Failure& f) {
      ++failed;
      fmt::print("FAIL {:2} {}: {}\n", i + 1, name, f.why);
    } catch (const std::exception& e) {
      ++failed;
      fmt::print("FAIL {:2} {}: exception: {}\n", i + 1, name, e.what());
    }
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
