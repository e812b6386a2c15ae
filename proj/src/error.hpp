#pragma once

#include <stdexcept>
#include <string>

namespace hiercos {

// Error taxonomy. The groups drive the CLI exit-code mapping:
// io/parse -> 1, tree structure -> 2, everything else -> 3.
enum class Err {
  // io / parse
  IoError,
  MalformedLine,
  BadCheckpoint,
  // tree structure
  DuplicateNode,
  MultipleRoots,
  MissingRoot,
  CycleDetected,
  DanglingParent,
  // evaluation / usage
  UnknownNode,
  NotALeaf,
  LevelOutOfRange,
  AxisOutOfRange,
  NonPositiveMagnitude,
  NonPositiveDepth,
  NonFiniteInput,
  DimensionMismatch,
  DivergenceDetected,
  KOutOfRange,
  NotAPermutation,
  UnequalLeafDepths,
  MissingLevelPredictions,
  UnknownClassInPredictions,
  RowLengthMismatch,
  InvalidArgument,
};

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& message, long line = -1)
      : std::runtime_error(line >= 0 ? message + " (line " + std::to_string(line) + ")"
                                     : message),
        code_(code),
        line_(line) {}

  Err code() const noexcept { return code_; }
  long input_line() const noexcept { return line_; }  // 1-based, -1 when not tied to a line

private:
  Err code_;
  long line_;
};

int exit_code(Err code) noexcept;
const char* err_name(Err code) noexcept;

}  // namespace hiercos
