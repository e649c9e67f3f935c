#include "spafac/error.hpp"

namespace spafac {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PartitionMismatch: return "PartitionMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::DegenerateReference: return "DegenerateReference";
    case ErrorCode::InfeasibleConstraints: return "InfeasibleConstraints";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::ZeroMarginal: return "ZeroMarginal";
    case ErrorCode::InvalidCoding: return "InvalidCoding";
    case ErrorCode::EmptyLevel: return "EmptyLevel";
    case ErrorCode::GroupMismatch: return "GroupMismatch";
    case ErrorCode::OrderUnavailable: return "OrderUnavailable";
    case ErrorCode::ZeroSupplementary: return "ZeroSupplementary";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::TooFewDistinct: return "TooFewDistinct";
  }
  return "Unknown";
}

}  // namespace spafac
