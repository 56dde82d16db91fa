#pragma once

#include <stdexcept>
#include <string>

namespace mbloch {

enum class ErrorCode {
  InvalidParameter,
  NonFiniteValue,
  InvalidSpan,
  ToleranceOutOfRange,
  DomainExceeded,
  PoleProximity,
  NoReturn,
  SeedOffSurface,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidSpan: return "InvalidSpan";
    case ErrorCode::ToleranceOutOfRange: return "ToleranceOutOfRange";
    case ErrorCode::DomainExceeded: return "DomainExceeded";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::NoReturn: return "NoReturn";
    case ErrorCode::SeedOffSurface: return "SeedOffSurface";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mbloch
