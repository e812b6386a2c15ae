#include "error.hpp"

namespace hiercos {

int exit_code(Err code) noexcept {
  switch (code) {
    case Err::IoError:
    case Err::MalformedLine:
    case Err::BadCheckpoint:
      return 1;
    case Err::DuplicateNode:
    case Err::MultipleRoots:
    case Err::MissingRoot:
    case Err::CycleDetected:
    case Err::DanglingParent:
      return 2;
    default:
      return 3;
  }
}

const char* err_name(Err code) noexcept {
  switch (code) {
    case Err::IoError: return "IoError";
    case Err::MalformedLine: return "MalformedLine";
    case Err::BadCheckpoint: return "BadCheckpoint";
    case Err::DuplicateNode: return "DuplicateNode";
    case Err::MultipleRoots: return "MultipleRoots";
    case Err::MissingRoot: return "MissingRoot";
    case Err::CycleDetected: return "CycleDetected";
    case Err::DanglingParent: return "DanglingParent";
    case Err::UnknownNode: return "UnknownNode";
    case Err::NotALeaf: return "NotALeaf";
    case Err::LevelOutOfRange: return "LevelOutOfRange";
    case Err::AxisOutOfRange: return "AxisOutOfRange";
    case Err::NonPositiveMagnitude: return "NonPositiveMagnitude";
    case Err::NonPositiveDepth: return "NonPositiveDepth";
    case Err::NonFiniteInput: return "NonFiniteInput";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::DivergenceDetected: return "DivergenceDetected";
    case Err::KOutOfRange: return "KOutOfRange";
    case Err::NotAPermutation: return "NotAPermutation";
    case Err::UnequalLeafDepths: return "UnequalLeafDepths";
    case Err::MissingLevelPredictions: return "MissingLevelPredictions";
    case Err::UnknownClassInPredictions: return "UnknownClassInPredictions";
    case Err::RowLengthMismatch: return "RowLengthMismatch";
    case Err::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace hiercos
