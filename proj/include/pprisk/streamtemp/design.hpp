#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pprisk/calendar.hpp"
#include "pprisk/error.hpp"

namespace pprisk::streamtemp {

enum class PredictorSource { AirTemperature, LongwaveClearSky, ShortwaveClearSky };

struct PredictorTerm {
  PredictorSource source;
  int lag;  // months, 0..2
  friend bool operator==(const PredictorTerm&, const PredictorTerm&) = default;
};

/// Predictor set plus forecast lead. Row for target month m uses each term
/// at month m - lead - lag.
struct PredictorSpec {
  std::vector<PredictorTerm> terms;
  int lead = 0;

  int max_lag() const {
    int m = 0;
    for (const auto& t : terms) m = std::max(m, t.lag);
    return m;
  }

  void validate() const {
    if (terms.empty()) throw Error(ErrorCode::Validation, "streamtemp", "empty predictor set");
    for (const auto& t : terms)
      if (t.lag < 0 || t.lag > 2) throw Error(ErrorCode::Validation, "streamtemp", "predictor lag must be 0, 1 or 2");
    if (lead < 0) throw Error(ErrorCode::Validation, "streamtemp", "negative lead");
  }

  bool uses(PredictorSource s) const {
    return std::any_of(terms.begin(), terms.end(), [s](const auto& t) { return t.source == s; });
  }
};

/// The four candidate predictor sets; model 4 (air temperature at lags
/// 0-2) is the production default.
inline PredictorSpec predictor_model(int model) {
  using S = PredictorSource;
  switch (model) {
    case 1:
      return {{{S::AirTemperature, 0}, {S::AirTemperature, 1}, {S::AirTemperature, 2},
               {S::LongwaveClearSky, 0}, {S::LongwaveClearSky, 1},
               {S::ShortwaveClearSky, 0}, {S::ShortwaveClearSky, 1}}, 0};
    case 2: return {{{S::AirTemperature, 0}, {S::LongwaveClearSky, 0}, {S::ShortwaveClearSky, 0}}, 0};
    case 3: return {{{S::AirTemperature, 0}, {S::AirTemperature, 1}, {S::LongwaveClearSky, 0}}, 0};
    case 4: return {{{S::AirTemperature, 0}, {S::AirTemperature, 1}, {S::AirTemperature, 2}}, 0};
    default: throw Error(ErrorCode::Validation, "streamtemp", "predictor model must be 1..4");
  }
}

inline std::string term_name(const PredictorTerm& t) {
  std::string base = t.source == PredictorSource::AirTemperature   ? "t_air"
                     : t.source == PredictorSource::LongwaveClearSky ? "rldscs"
                                                                     : "rsdscs";
  return t.lag == 0 ? base + "(t)" : base + "(t-" + std::to_string(t.lag) + ")";
}

/// Climate predictor series at one location.
struct PredictorInputs {
  MonthlySeries air;
  std::optional<MonthlySeries> longwave;
  std::optional<MonthlySeries> shortwave;

  const MonthlySeries* series(PredictorSource s) const {
    switch (s) {
      case PredictorSource::AirTemperature: return &air;
      case PredictorSource::LongwaveClearSky: return longwave ? &*longwave : nullptr;
      case PredictorSource::ShortwaveClearSky: return shortwave ? &*shortwave : nullptr;
    }
    return nullptr;
  }
};

struct Design {
  Eigen::MatrixXd features;      // rows x terms
  Eigen::VectorXd target;        // empty when built without a target
  std::vector<int> month_index;  // target month of each row
  std::size_t dropped = 0;       // rows lost to missing predictors
};

namespace detail {
inline std::optional<double> predictor_at(const PredictorInputs& in, const PredictorTerm& t, int month) {
  const MonthlySeries* s = in.series(t.source);
  if (!s || !s->covers(month)) return std::nullopt;
  double v = s->at_index(month);
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}
}  // namespace detail

/// Aligned regression rows for (month index, observed value) targets.
inline Design build_design(const PredictorInputs& inputs, const PredictorSpec& spec,
                           const std::vector<std::pair<int, double>>& targets) {
  spec.validate();
  std::vector<std::vector<double>> rows;
  Design d;
  std::vector<double> y;
  for (const auto& [month, value] : targets) {
    std::vector<double> row;
    row.reserve(spec.terms.size());
    for (const auto& t : spec.terms) {
      auto v = detail::predictor_at(inputs, t, month - spec.lead - t.lag);
      if (!v) break;
      row.push_back(*v);
    }
    if (row.size() != spec.terms.size()) {
      ++d.dropped;
      continue;
    }
    rows.push_back(std::move(row));
    y.push_back(value);
    d.month_index.push_back(month);
  }
  if (rows.empty()) throw Error(ErrorCode::Alignment, "streamtemp", "no rows survive predictor alignment");
  d.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(spec.terms.size()));
  d.target.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    d.target(static_cast<Eigen::Index>(i)) = y[i];
  }
  return d;
}

/// Feature rows for prediction months (no target).
inline Design build_features(const PredictorInputs& inputs, const PredictorSpec& spec,
                             const std::vector<int>& months) {
  std::vector<std::pair<int, double>> targets;
  targets.reserve(months.size());
  for (int m : months) targets.emplace_back(m, 0.0);
  Design d = build_design(inputs, spec, targets);
  d.target.resize(0);
  return d;
}

}  // namespace pprisk::streamtemp
