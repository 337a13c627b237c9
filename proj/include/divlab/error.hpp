#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace divlab {

enum class ErrorKind {
  kStructural,
  kParse,
  kEmptySubset,
  kCapExceeded,
  kOverflow,
  kMixedBase,
  kEmptySupport,
  kNotAdmissible,
  kDuplicateLabel,
  kInvalidPartialIso,
  kDistortionTooLarge,
  kInvalidOrdering,
  kInfeasibleInterval,
  kGenerationExhausted,
  kInvalidArgument,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kStructural: return "StructuralError";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kEmptySubset: return "EmptySubset";
    case ErrorKind::kCapExceeded: return "CapExceeded";
    case ErrorKind::kOverflow: return "Overflow";
    case ErrorKind::kMixedBase: return "MixedBase";
    case ErrorKind::kEmptySupport: return "EmptySupport";
    case ErrorKind::kNotAdmissible: return "NotAdmissible";
    case ErrorKind::kDuplicateLabel: return "DuplicateLabel";
    case ErrorKind::kInvalidPartialIso: return "InvalidPartialIso";
    case ErrorKind::kDistortionTooLarge: return "DistortionTooLarge";
    case ErrorKind::kInvalidOrdering: return "InvalidOrdering";
    case ErrorKind::kInfeasibleInterval: return "InfeasibleInterval";
    case ErrorKind::kGenerationExhausted: return "GenerationExhausted";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace divlab
