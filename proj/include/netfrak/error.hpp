#ifndef NETFRAK_ERROR_HPP
#define NETFRAK_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace netfrak {

enum class ErrorCode {
  // geometry
  ZeroLengthSegment,
  Disconnected,
  CrossingSegments,
  DuplicateSegment,
  BadIndex,
  EmptyNetwork,
  TooFarFromNetwork,
  BadSpacing,
  NotSimple,
  // metric
  EmptyBallBoundary,
  // intensity
  TooFewPoints,
  BadBandwidth,
  EmptySurface,
  // summaries
  NonPositiveIntensityAtDataPoint,
  EmptyGrid,
  GridMismatch,
  RMaxExceedsR,
  BadRGrid,
  // simulate
  BadDominating,
  FieldTooLarge,
  CovarianceNotPD,
  BadParameter,
  // envelope / io
  AllUndefined,
  BadInput,
  // a broken internal invariant, never a user error
  Internal,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroLengthSegment: return "ZeroLengthSegment";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::CrossingSegments: return "CrossingSegments";
    case ErrorCode::DuplicateSegment: return "DuplicateSegment";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::EmptyNetwork: return "EmptyNetwork";
    case ErrorCode::TooFarFromNetwork: return "TooFarFromNetwork";
    case ErrorCode::BadSpacing: return "BadSpacing";
    case ErrorCode::NotSimple: return "NotSimple";
    case ErrorCode::EmptyBallBoundary: return "EmptyBallBoundary";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::BadBandwidth: return "BadBandwidth";
    case ErrorCode::EmptySurface: return "EmptySurface";
    case ErrorCode::NonPositiveIntensityAtDataPoint: return "NonPositiveIntensityAtDataPoint";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::RMaxExceedsR: return "RMaxExceedsR";
    case ErrorCode::BadRGrid: return "BadRGrid";
    case ErrorCode::BadDominating: return "BadDominating";
    case ErrorCode::FieldTooLarge: return "FieldTooLarge";
    case ErrorCode::CovarianceNotPD: return "CovarianceNotPD";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::AllUndefined: return "AllUndefined";
    case ErrorCode::BadInput: return "BadInput";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace netfrak

#endif  // NETFRAK_ERROR_HPP
