#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pprisk {

enum class ErrorCode {
  DomainCoverage,   // point or grid outside the source domain
  UndefinedRate,    // growth rate with zero base population
  InvalidRate,      // 1 + rate < 0
  InvalidReference, // non-positive national reference
  Alignment,        // grids/axes/provenance disagree
  Coverage,         // a window or partition is not fully covered
  Validation,       // value outside its admissible range
  EmptyEnsemble,
  Rank,
  InsufficientData,
  ZeroVariance,
  Conditioning,
  Shape,
  ThermalShutdown,
  Parse,
  Referential,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainCoverage: return "domain-coverage";
    case ErrorCode::UndefinedRate: return "undefined-rate";
    case ErrorCode::InvalidRate: return "invalid-rate";
    case ErrorCode::InvalidReference: return "invalid-reference";
    case ErrorCode::Alignment: return "alignment";
    case ErrorCode::Coverage: return "coverage";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::EmptyEnsemble: return "empty-ensemble";
    case ErrorCode::Rank: return "rank";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::ZeroVariance: return "zero-variance";
    case ErrorCode::Conditioning: return "conditioning";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::ThermalShutdown: return "thermal-shutdown";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Referential: return "referential";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

/// Library-wide exception. Carries a machine-checkable code and the tag of
/// the module that raised it so the CLI can report `[module] code: message`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, const std::string& what)
      : std::runtime_error(what), code_(code), module_(std::move(module)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorCode code_;
  std::string module_;
};

}  // namespace pprisk
