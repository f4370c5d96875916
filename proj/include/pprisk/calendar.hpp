#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pprisk/error.hpp"

namespace pprisk {

/// Calendar month. Ordered, and convertible to a dense month index
/// (year * 12 + month - 1) for arithmetic on monthly axes.
struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12

  constexpr int index() const { return year * 12 + (month - 1); }
  static constexpr YearMonth from_index(int idx) {
    int y = idx >= 0 ? idx / 12 : -((-idx + 11) / 12);
    return {y, idx - y * 12 + 1};
  }
  friend constexpr auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

/// A monthly series on a contiguous axis starting at `start`.
struct MonthlySeries {
  YearMonth start;
  std::vector<double> values;

  int first_index() const { return start.index(); }
  int end_index() const { return start.index() + static_cast<int>(values.size()); }
  bool covers(int idx) const { return idx >= first_index() && idx < end_index(); }
  double at_index(int idx) const { return values[static_cast<std::size_t>(idx - first_index())]; }
};

enum class WindowLabel { W2010s, W2020s, W2030s, W2040s };

/// Labeled 5-year climatology period.
struct ClimatologyWindow {
  WindowLabel label;
  int first_year;
  int last_year;

  int years() const { return last_year - first_year + 1; }
  int center_year() const { return (first_year + last_year) / 2; }
  int first_month_index() const { return YearMonth{first_year, 1}.index(); }
  int end_month_index() const { return YearMonth{last_year + 1, 1}.index(); }
};

inline constexpr std::array<ClimatologyWindow, 4> kWindows{{
    {WindowLabel::W2010s, 2008, 2012},
    {WindowLabel::W2020s, 2018, 2022},
    {WindowLabel::W2030s, 2028, 2032},
    {WindowLabel::W2040s, 2038, 2042},
}};

inline ClimatologyWindow window_of(WindowLabel label) {
  return kWindows[static_cast<std::size_t>(label)];
}

inline std::string_view to_string(WindowLabel label) {
  switch (label) {
    case WindowLabel::W2010s: return "2010s";
    case WindowLabel::W2020s: return "2020s";
    case WindowLabel::W2030s: return "2030s";
    case WindowLabel::W2040s: return "2040s";
  }
  return "?";
}

inline std::optional<ClimatologyWindow> parse_window(std::string_view text) {
  for (const auto& w : kWindows)
    if (to_string(w.label) == text) return w;
  return std::nullopt;
}

/// Baseline window against which changes are reported.
inline ClimatologyWindow baseline_window() { return kWindows[0]; }

}  // namespace pprisk
