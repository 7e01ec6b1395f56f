#pragma once

#include <stdexcept>
#include <string>

namespace chj {

enum class Errc {
  UnknownModel,
  MissingParam,
  LambdaBoundViolated,
  RadiusTooSmall,
  NonConcaveDetected,
  GridMismatch,
  CFLViolated,
  PenaltyDominates,
  BrokenChain,
  FixedPointStalled,
  AuditFailed,
  NoBoundedSample,
  ConfigError,
  Internal,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::UnknownModel: return "UnknownModel";
    case Errc::MissingParam: return "MissingParam";
    case Errc::LambdaBoundViolated: return "LambdaBoundViolated";
    case Errc::RadiusTooSmall: return "RadiusTooSmall";
    case Errc::NonConcaveDetected: return "NonConcaveDetected";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::CFLViolated: return "CFLViolated";
    case Errc::PenaltyDominates: return "PenaltyDominates";
    case Errc::BrokenChain: return "BrokenChain";
    case Errc::FixedPointStalled: return "FixedPointStalled";
    case Errc::AuditFailed: return "AuditFailed";
    case Errc::NoBoundedSample: return "NoBoundedSample";
    case Errc::ConfigError: return "ConfigError";
    case Errc::Internal: return "Internal";
  }
  return "Error";
}

/// Library error with a machine-readable code (CLI maps codes to exit status).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace chj
