#pragma once

#include <stdexcept>
#include <string>

namespace robust {

enum class ErrorCode {
  RankDeficient,
  InvalidK,
  NotDivisible,
  MissingTruth,
  InvalidClipLevel,
  TooShort,
  InvalidSize,
  InvalidPlan,
  NonStationary,
  TooLarge,
  HypothesisViolated,
  InvalidArgs,
  IoError,
  ParseError,
};

const char* to_string(ErrorCode code);

/// Every failure the library reports is a robust::Error carrying one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::MissingTruth: return "MissingTruth";
    case ErrorCode::InvalidClipLevel: return "InvalidClipLevel";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::InvalidSize: return "InvalidSize";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::NonStationary: return "NonStationary";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::InvalidArgs: return "InvalidArgs";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace robust
