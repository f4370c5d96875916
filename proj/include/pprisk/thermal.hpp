#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "pprisk/csv.hpp"
#include "pprisk/error.hpp"

namespace pprisk::thermal {

inline constexpr double kDefaultThresholdC = 32.2;
inline constexpr double kWaterDensity = 1000.0;  // kg/m³
inline constexpr double kWaterHeatCapacity = 4186.0;  // J/(kg K)

namespace detail {
inline std::string canonical_state(std::string_view s) {
  std::string out;
  bool word_start = true;
  for (char c : csv::trim(s)) {
    if (c == '_') c = ' ';
    out.push_back(word_start ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                             : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    word_start = (c == ' ');
  }
  return out;
}

inline const std::map<std::string, std::string, std::less<>>& state_abbreviations() {
  static const std::map<std::string, std::string, std::less<>> m{
      {"AL", "Alabama"}, {"AK", "Alaska"}, {"AZ", "Arizona"}, {"AR", "Arkansas"}, {"CA", "California"},
      {"CO", "Colorado"}, {"CT", "Connecticut"}, {"DE", "Delaware"}, {"DC", "District Of Columbia"},
      {"FL", "Florida"}, {"GA", "Georgia"}, {"HI", "Hawaii"}, {"ID", "Idaho"}, {"IL", "Illinois"},
      {"IN", "Indiana"}, {"IA", "Iowa"}, {"KS", "Kansas"}, {"KY", "Kentucky"}, {"LA", "Louisiana"},
      {"ME", "Maine"}, {"MD", "Maryland"}, {"MA", "Massachusetts"}, {"MI", "Michigan"}, {"MN", "Minnesota"},
      {"MS", "Mississippi"}, {"MO", "Missouri"}, {"MT", "Montana"}, {"NE", "Nebraska"}, {"NV", "Nevada"},
      {"NH", "New Hampshire"}, {"NJ", "New Jersey"}, {"NM", "New Mexico"}, {"NY", "New York"},
      {"NC", "North Carolina"}, {"ND", "North Dakota"}, {"OH", "Ohio"}, {"OK", "Oklahoma"}, {"OR", "Oregon"},
      {"PA", "Pennsylvania"}, {"RI", "Rhode Island"}, {"SC", "South Carolina"}, {"SD", "South Dakota"},
      {"TN", "Tennessee"}, {"TX", "Texas"}, {"UT", "Utah"}, {"VT", "Vermont"}, {"VA", "Virginia"},
      {"WA", "Washington"}, {"WV", "West Virginia"}, {"WI", "Wisconsin"}, {"WY", "Wyoming"}};
  return m;
}
}  // namespace detail

/// Normalized state name: title case, USPS codes expanded.
inline std::string normalize_state(std::string_view s) {
  std::string t(csv::trim(s));
  if (t.size() == 2) {
    std::string up{static_cast<char>(std::toupper(static_cast<unsigned char>(t[0]))),
                   static_cast<char>(std::toupper(static_cast<unsigned char>(t[1])))};
    auto& abbr = detail::state_abbreviations();
    if (auto it = abbr.find(up); it != abbr.end()) return it->second;
  }
  return detail::canonical_state(t);
}

/// State stream-temperature limits (°C) with a default for unlisted states.
class StateThresholds {
 public:
  StateThresholds() = default;

  /// The regulatory table: seven listed states, 32.2 °C elsewhere.
  static StateThresholds standard() {
    StateThresholds t;
    t.set("Indiana", 35.0);
    t.set("Kentucky", 31.7);
    t.set("Louisiana", 34.4);
    t.set("North Carolina", 34.8);
    t.set("Pennsylvania", 30.5);
    t.set("Virginia", 33.7);
    t.set("Wisconsin", 31.7);
    return t;
  }

  /// Reads `state,threshold_c`; a row named `default` overrides the fallback.
  static StateThresholds from_csv(const std::string& path) {
    auto table = csv::Table::read(path);
    table.require({"state", "threshold_c"});
    StateThresholds t;
    for (const auto& row : table.rows()) {
      double v = row.num("threshold_c");
      if (v < -5 || v > 50) row.fail("threshold_c", "threshold outside [-5, 50] degC");
      std::string state(csv::trim(row.str("state")));
      if (state == "default" || state == "*") t.default_c_ = v;
      else t.set(state, v);
    }
    return t;
  }

  void set(std::string_view state, double threshold_c) { table_[normalize_state(state)] = threshold_c; }

  struct Lookup {
    double threshold_c;
    bool listed;
  };

  Lookup lookup(std::string_view state) const {
    auto it = table_.find(normalize_state(state));
    if (it == table_.end()) return {default_c_, false};
    return {it->second, true};
  }

  double threshold(std::string_view state) const { return lookup(state).threshold_c; }
  double default_threshold() const { return default_c_; }
  const std::map<std::string, double>& listed() const { return table_; }

 private:
  std::map<std::string, double> table_;
  double default_c_ = kDefaultThresholdC;
};

/// 1 when the maximum stream temperature strictly exceeds the state limit.
inline int wtsi(double max_stream_temp_c, double threshold_c) { return max_stream_temp_c > threshold_c ? 1 : 0; }

inline int wtsi(double max_stream_temp_c, std::string_view state, const StateThresholds& table) {
  return wtsi(max_stream_temp_c, table.threshold(state));
}

enum class Cooling { OnceThrough, Recirculating, Dry, Hybrid };

inline std::string_view to_string(Cooling c) {
  switch (c) {
    case Cooling::OnceThrough: return "once_through";
    case Cooling::Recirculating: return "recirculating";
    case Cooling::Dry: return "dry";
    case Cooling::Hybrid: return "hybrid";
  }
  return "?";
}

inline std::optional<Cooling> parse_cooling(std::string_view s) {
  for (auto c : {Cooling::OnceThrough, Cooling::Recirculating, Cooling::Dry, Cooling::Hybrid})
    if (to_string(c) == s) return c;
  if (s == "once-through" || s == "OT") return Cooling::OnceThrough;
  if (s == "recirculating_tower" || s == "RC" || s == "wet_recirculating") return Cooling::Recirculating;
  return std::nullopt;
}

inline bool is_wet(Cooling c) { return c == Cooling::OnceThrough || c == Cooling::Recirculating; }

/// Plant cooling-water parameters, SI units. Defaults are engineering
/// placeholders.
struct PlantThermalSpec {
  double capacity_w = 0.0;
  double eta_total = 0.40;
  double eta_elec = 0.40;
  double alpha = 0.1;    // waste-heat share not carried by cooling water
  double beta = 0.2;     // waste-heat share rejected to air (recirculating)
  double omega = 1.0;    // air temperature / humidity correction
  double epsilon = 1.0;  // blowdown densification factor
  double lambda = 1.0;   // efficiency correction
  double delta_t_max_k = 10.0;
  double t_max_c = kDefaultThresholdC;
  double rho_w = kWaterDensity;
  double c_p = kWaterHeatCapacity;
  double gamma = 0.3;  // max usable share of streamflow
  Cooling cooling = Cooling::OnceThrough;

  void validate() const {
    auto bad = [](const char* what) { throw Error(ErrorCode::Validation, "thermal", what); };
    if (!(capacity_w >= 0)) bad("installed capacity must be non-negative");
    if (!(eta_elec > 0 && eta_elec <= 1)) bad("electrical efficiency must be in (0, 1]");
    if (!(eta_total > 0 && eta_total <= 1)) bad("net efficiency must be in (0, 1]");
    for (double f : {alpha, beta, gamma})
      if (!(f >= 0 && f <= 1)) bad("alpha, beta and gamma must be in [0, 1]");
    if (!(delta_t_max_k > 0)) bad("maximum temperature rise must be positive");
    if (!(omega > 0 && epsilon > 0 && lambda > 0)) bad("omega, epsilon and lambda must be positive");
  }

  /// Waste heat per unit output, (1 - eta_total) / eta_elec.
  double heat_ratio() const { return (1.0 - eta_total) / eta_elec; }
};

/// Usable heating of intake water: max(min(T_max - T_w, dT_max), 0).
inline double allowable_rise(double t_max_c, double t_w_c, double delta_t_max_k) {
  return std::max(std::min(t_max_c - t_w_c, delta_t_max_k), 0.0);
}

namespace detail {
inline double withdrawal(const PlantThermalSpec& s, double t_w_c, double water_share) {
  s.validate();
  double rise = allowable_rise(s.t_max_c, t_w_c, s.delta_t_max_k);
  if (!(rise > 0))
    throw Error(ErrorCode::ThermalShutdown, "thermal",
                "intake at or above the permissible temperature: plant must shut down");
  return s.capacity_w * s.heat_ratio() * water_share / (s.rho_w * s.c_p * rise);
}

/// min(gamma Q, q) rho Cp rise / (heat_ratio lambda share), capped at P,
/// evaluated as P min(gamma Q, q) / (q lambda) with q at full P.
inline double usable_capacity(const PlantThermalSpec& s, double t_w_c, double streamflow_m3s, double water_share) {
  s.validate();
  if (streamflow_m3s < 0) throw Error(ErrorCode::Validation, "thermal", "negative streamflow");
  double rise = allowable_rise(s.t_max_c, t_w_c, s.delta_t_max_k);
  if (!(rise > 0)) return 0.0;
  if (s.capacity_w == 0.0) return 0.0;
  if (water_share == 0.0) return std::min(s.capacity_w / s.lambda, s.capacity_w);  // no heat goes to water
  double q = s.capacity_w * s.heat_ratio() * water_share / (s.rho_w * s.c_p * rise);
  double usable = std::min(s.gamma * streamflow_m3s, q) / q;
  return std::min(s.capacity_w * usable / s.lambda, s.capacity_w);
}

inline double recirculating_share(const PlantThermalSpec& s) {
  return (1.0 - s.alpha) * (1.0 - s.beta) * s.omega * s.epsilon;
}
}  // namespace detail

/// Required once-through withdrawal (m³/s) at stream temperature T_w.
inline double once_through_withdrawal(const PlantThermalSpec& s, double t_w_c) {
  return detail::withdrawal(s, t_w_c, 1.0 - s.alpha);
}

/// Maximum usable once-through capacity (W) given streamflow Q (m³/s).
inline double once_through_capacity(const PlantThermalSpec& s, double t_w_c, double streamflow_m3s) {
  return detail::usable_capacity(s, t_w_c, streamflow_m3s, 1.0 - s.alpha);
}

inline double recirc_withdrawal(const PlantThermalSpec& s, double t_w_c) {
  return detail::withdrawal(s, t_w_c, detail::recirculating_share(s));
}

inline double recirc_capacity(const PlantThermalSpec& s, double t_w_c, double streamflow_m3s) {
  return detail::usable_capacity(s, t_w_c, streamflow_m3s, detail::recirculating_share(s));
}

/// Change in plant efficiency, percent: -0.01 per K of air warming and
/// -0.02 per K of stream warming.
inline double efficiency_sensitivity(double delta_air_k, double delta_stream_k) {
  return -(0.01 * delta_air_k + 0.02 * delta_stream_k);
}

}  // namespace pprisk::thermal
