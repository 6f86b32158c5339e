#pragma once

#include <stdexcept>
#include <string>

namespace semtype {

// Error identities used across the toolkit. Tests match on the code, not
// the message text.
enum class Err {
  EmptyFile,
  MalformedHeader,
  AllMissing,
  NoFiles,
  TooShort,
  SeriesTooShort,
  WindowTooShort,
  DegenerateTrajectory,
  BadDimension,
  ZeroVector,
  LengthMismatch,
  EmptyLabel,
  NoConvergence,
  BadK,
  SingleClass,
  EmptyData,
  DimensionMismatch,
  ClassTooSmall,
  EmptyGrid,
  TooFewSamples,
  LabelOutOfRange,
  EmptyMatrix,
  BadSpec,
  BadConfig,
  IoFailure,
};

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const noexcept { return code_; }

private:
  Err code_;
};

[[noreturn]] inline void raise(Err code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace semtype
