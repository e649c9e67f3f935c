#pragma once

#include <stdexcept>
#include <string>

namespace spafac {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  PartitionMismatch,
  DegenerateInput,
  DegenerateReference,
  InfeasibleConstraints,
  NonConvergence,
  EmptyTable,
  ZeroMarginal,
  InvalidCoding,
  EmptyLevel,
  GroupMismatch,
  OrderUnavailable,
  ZeroSupplementary,
  ParseError,
  NegativeCount,
  MissingCell,
  TooFewDistinct,
};

// Coarse classes used by the command line front end to pick an exit status.
enum class ErrorClass { Usage = 1, Parse = 2, Validation = 3, NonConvergence = 4, Infeasible = 5 };

constexpr ErrorClass error_class(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::NegativeCount:
    case ErrorCode::MissingCell:
      return ErrorClass::Parse;
    case ErrorCode::NonConvergence:
      return ErrorClass::NonConvergence;
    case ErrorCode::InfeasibleConstraints:
      return ErrorClass::Infeasible;
    default:
      return ErrorClass::Validation;
  }
}

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorClass error_class() const noexcept { return spafac::error_class(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace spafac
