#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pprisk/calendar.hpp"
#include "pprisk/error.hpp"
#include "pprisk/streamtemp/design.hpp"
#include "pprisk/streamtemp/diagnostics.hpp"
#include "pprisk/streamtemp/impute.hpp"
#include "pprisk/streamtemp/lssvm.hpp"
#include "pprisk/streamtemp/mann_kendall.hpp"
#include "pprisk/streamtemp/metrics.hpp"

namespace pprisk::streamtemp {

inline constexpr double kMinStreamTemp = -5.0;
inline constexpr double kMaxStreamTemp = 50.0;
inline constexpr int kMinTrendYears = 7;

/// Monthly stream-temperature record of one gauge; gaps are nullopt.
struct GaugeSeries {
  std::string gauge_id;
  double lat = 0.0;
  double lon = 0.0;
  std::string fips;
  std::string state;
  YearMonth start;
  std::vector<std::optional<double>> temps;

  int record_years() const {
    std::set<int> years;
    for (std::size_t i = 0; i < temps.size(); ++i)
      if (temps[i]) years.insert(YearMonth::from_index(start.index() + static_cast<int>(i)).year);
    return static_cast<int>(years.size());
  }

  /// (month index, value) of every observed month.
  std::vector<std::pair<int, double>> observed() const {
    std::vector<std::pair<int, double>> out;
    for (std::size_t i = 0; i < temps.size(); ++i)
      if (temps[i]) out.emplace_back(start.index() + static_cast<int>(i), *temps[i]);
    return out;
  }
};

/// Fills gaps between the first and last observation.
inline MonthlySeries imputed_record(const GaugeSeries& g) {
  std::size_t first = 0, last = g.temps.size();
  while (first < g.temps.size() && !g.temps[first]) ++first;
  while (last > first && !g.temps[last - 1]) --last;
  std::vector<std::optional<double>> span(g.temps.begin() + static_cast<std::ptrdiff_t>(first),
                                          g.temps.begin() + static_cast<std::ptrdiff_t>(last));
  MonthlySeries s;
  s.start = YearMonth::from_index(g.start.index() + static_cast<int>(first));
  s.values = impute(span);
  return s;
}

/// Trend of the imputed record, or nullopt when fewer than 7 years have data.
inline std::optional<TrendResult> gauge_trend(const GaugeSeries& g, double alpha = 0.10,
                                              int min_years = kMinTrendYears) {
  if (g.record_years() < min_years) return std::nullopt;
  auto s = imputed_record(g);
  return mk_trend(s.values, alpha);
}

struct SplitYears {
  int train_first = 1998;
  int train_last = 2007;
  int test_first = 2008;
  int test_last = 2012;
};

/// Row positions of the training and validation partitions.
struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

/// Partitions rows by calendar year of their month index.
inline Split validation_split(const std::vector<int>& month_index, const SplitYears& years = {}) {
  Split s;
  for (std::size_t i = 0; i < month_index.size(); ++i) {
    int y = YearMonth::from_index(month_index[i]).year;
    if (y >= years.train_first && y <= years.train_last) s.train.push_back(static_cast<Eigen::Index>(i));
    else if (y >= years.test_first && y <= years.test_last) s.test.push_back(static_cast<Eigen::Index>(i));
  }
  if (s.train.empty() || s.test.empty())
    throw Error(ErrorCode::Coverage, "streamtemp", "training or validation partition is empty");
  return s;
}

inline std::vector<double> bias_correct(std::span<const double> projection, double validation_bias) {
  std::vector<double> out(projection.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = projection[i] - validation_bias;
  return out;
}

inline MonthlySeries bias_correct(const MonthlySeries& projection, double validation_bias) {
  return {projection.start, bias_correct(projection.values, validation_bias)};
}

/// Largest monthly value inside the window; every month must be present.
inline double max_monthly(const MonthlySeries& series, const ClimatologyWindow& window) {
  int first = window.first_month_index(), end = window.end_month_index();
  if (!series.covers(first) || !series.covers(end - 1))
    throw Error(ErrorCode::Coverage, "streamtemp",
                "series does not cover window " + std::string(to_string(window.label)));
  double best = -std::numeric_limits<double>::infinity();
  for (int m = first; m < end; ++m) {
    double v = series.at_index(m);
    if (!std::isfinite(v)) throw Error(ErrorCode::Coverage, "streamtemp", "missing month in window");
    best = std::max(best, v);
  }
  return best;
}

/// Trained stream-temperature regression for one gauge plus its
/// validation-period skill.
struct GaugeModel {
  std::string gauge_id;
  PredictorSpec spec;
  LssvmModel model;
  Standardizer target_scale;
  Hyperparams hyper;
  double train_nse = 0.0, train_r = 0.0;
  double test_nse = 0.0, test_r = 0.0;
  double bias = 0.0;  // mean(predicted - observed) over validation months
  std::size_t n_train = 0, n_test = 0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& raw) const {
    Eigen::VectorXd z = lssvm_predict(model, raw);
    return (z.array() * target_scale.scale + target_scale.mean).matrix();
  }
};

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Tunes and fits the regression on the training years, scores it on the
/// validation years. Feature and target scaling come from training rows only.
inline GaugeModel fit_gauge_model(const GaugeSeries& g, const PredictorInputs& inputs, const PredictorSpec& spec,
                                  const SplitYears& years = {}) {
  Design d = build_design(inputs, spec, g.observed());
  Split split = validation_split(d.month_index, years);
  Eigen::MatrixXd xtr = d.features(split.train, Eigen::all), xte = d.features(split.test, Eigen::all);
  Eigen::VectorXd ytr = d.target(split.train), yte = d.target(split.test);

  GaugeModel gm;
  gm.gauge_id = g.gauge_id;
  gm.spec = spec;
  gm.n_train = split.train.size();
  gm.n_test = split.test.size();
  FeatureScaling scaling = FeatureScaling::fit(xtr);
  gm.target_scale = Standardizer::fit(to_std(ytr));
  Eigen::VectorXd ztr = (ytr.array() - gm.target_scale.mean) / gm.target_scale.scale;
  Eigen::MatrixXd str = scaling.apply(xtr);
  gm.hyper = tune_hyperparams(str, ztr);
  gm.model = lssvm_fit(str, ztr, gm.hyper.sigma, gm.hyper.gamma, &scaling);

  auto ptr = to_std(gm.predict(xtr)), pte = to_std(gm.predict(xte));
  auto otr = to_std(ytr), ote = to_std(yte);
  gm.train_nse = nse(otr, ptr);
  gm.train_r = pearson_r(otr, ptr);
  gm.test_nse = nse(ote, pte);
  gm.test_r = pearson_r(ote, pte);
  gm.bias = mean_bias(ote, pte);
  return gm;
}

struct WindowProjection {
  WindowLabel window;
  double max_temp_c;  // bias-corrected
  double raw_max_c;
  double bias_c;
};

/// Projected monthly series over the window, bias-corrected, and its maximum.
inline WindowProjection project_window(const GaugeModel& gm, const PredictorInputs& inputs,
                                       const ClimatologyWindow& window) {
  std::vector<int> months;
  for (int m = window.first_month_index(); m < window.end_month_index(); ++m) months.push_back(m);
  Design d = build_features(inputs, gm.spec, months);
  if (d.dropped > 0)
    throw Error(ErrorCode::Coverage, "streamtemp",
                "predictors do not cover window " + std::string(to_string(window.label)));
  MonthlySeries raw{YearMonth::from_index(months.front()), to_std(gm.predict(d.features))};
  MonthlySeries corrected = bias_correct(raw, gm.bias);
  return {window.label, max_monthly(corrected, window), max_monthly(raw, window), gm.bias};
}

}  // namespace pprisk::streamtemp
