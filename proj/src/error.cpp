#include "levsketch/error.hpp"

namespace levsketch {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::MatrixTooLargeForDenseGram: return "MatrixTooLargeForDenseGram";
    case ErrorCode::NotPowerOfTwo: return "NotPowerOfTwo";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::InvalidKappa: return "InvalidKappa";
    case ErrorCode::RankTooLow: return "RankTooLow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace levsketch
