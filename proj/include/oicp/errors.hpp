#pragma once

#include <stdexcept>
#include <string>

namespace oicp {

enum class ErrorCode {
  kDegenerateRotation,
  kBadIntrinsics,
  kNoCorrespondences,
  kAllPairsRejected,
  kEmptyHistogram,
  kDegenerateSystem,
  kMalformedSequence,
  kParseError,
  kEmptyFrame,
  kDegenerateAlignment,
  kInsufficientOverlap,
  kUnknownScene,
  kBadConfig,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateRotation: return "DegenerateRotation";
    case ErrorCode::kBadIntrinsics: return "BadIntrinsics";
    case ErrorCode::kNoCorrespondences: return "NoCorrespondences";
    case ErrorCode::kAllPairsRejected: return "AllPairsRejected";
    case ErrorCode::kEmptyHistogram: return "EmptyHistogram";
    case ErrorCode::kDegenerateSystem: return "DegenerateSystem";
    case ErrorCode::kMalformedSequence: return "MalformedSequence";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyFrame: return "EmptyFrame";
    case ErrorCode::kDegenerateAlignment: return "DegenerateAlignment";
    case ErrorCode::kInsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::kUnknownScene: return "UnknownScene";
    case ErrorCode::kBadConfig: return "BadConfig";
  }
  return "UnknownError";
}

/// Library error carrying a stable machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace oicp
