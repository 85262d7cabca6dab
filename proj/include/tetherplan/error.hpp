#pragma once

#include <stdexcept>
#include <string>

namespace tetherplan {

// Error taxonomy shared by the whole toolkit. The CLI maps classes onto
// process exit codes, so keep the enum stable.
enum class ErrorClass {
  DegeneratePath,
  InvalidCatenary,
  TautTether,
  InfeasibleGeometry,
  NoPathFound,
  InvalidEndpoint,
  InfeasibleAtStart,
  FollowerStuck,
  DomainError,
  InvalidKnots,
  InternalInconsistency,
  InvariantViolation,
  ParseError,
  GenerationFailed,
  NoData,
};

inline const char* to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::DegeneratePath: return "DEGENERATE_PATH";
    case ErrorClass::InvalidCatenary: return "INVALID_CATENARY";
    case ErrorClass::TautTether: return "TAUT_TETHER";
    case ErrorClass::InfeasibleGeometry: return "INFEASIBLE_GEOMETRY";
    case ErrorClass::NoPathFound: return "NO_PATH_FOUND";
    case ErrorClass::InvalidEndpoint: return "INVALID_ENDPOINT";
    case ErrorClass::InfeasibleAtStart: return "INFEASIBLE_AT_START";
    case ErrorClass::FollowerStuck: return "FOLLOWER_STUCK";
    case ErrorClass::DomainError: return "DOMAIN_ERROR";
    case ErrorClass::InvalidKnots: return "INVALID_KNOTS";
    case ErrorClass::InternalInconsistency: return "INTERNAL_INCONSISTENCY";
    case ErrorClass::InvariantViolation: return "INVARIANT_VIOLATION";
    case ErrorClass::ParseError: return "PARSE_ERROR";
    case ErrorClass::GenerationFailed: return "GENERATION_FAILED";
    case ErrorClass::NoData: return "NO_DATA";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what)
      : std::runtime_error(std::string(to_string(cls)) + ": " + what), cls_(cls) {}

  ErrorClass cls() const { return cls_; }

 private:
  ErrorClass cls_;
};

[[noreturn]] inline void fail(ErrorClass cls, const std::string& what) {
  throw Error(cls, what);
}

}  // namespace tetherplan
