// Error taxonomy. Everything thrown by the library derives from Error so the
// CLI can map failures onto a small set of exit codes:
//   ParseError     -> 64  (bad flag values, malformed spec strings)
//   DomainError    -> 1   (precondition violations, wrong spectral regime,
//                          missing or malformed input files)
//   AccuracyError  -> 2   (loss of numerical accuracy: determinant drift,
//                          state blow-up, failed consistency checks)
#pragma once

#include <stdexcept>
#include <string>

namespace hillspec {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed user-facing text: potential specs, flag syntax.
struct ParseError : Error {
  using Error::Error;
};

// Violated mathematical or file-level preconditions.
struct DomainError : Error {
  using Error::Error;
};

// The computation ran but its accuracy contract failed.
struct AccuracyError : Error {
  using Error::Error;
};

// State norm exceeded the overflow guard during integration.
struct GrowthError : AccuracyError {
  using AccuracyError::AccuracyError;
};

}  // namespace hillspec
