#pragma once

#include <stdexcept>
#include <string>

namespace seggrasp {

enum class ErrorKind {
  Parse,
  DegenerateMesh,
  IndexOutOfRange,
  UnknownPrompt,
  ViewMismatch,
  LengthMismatch,
  DimensionMismatch,
  EmptyPart,
  BadQuaternion,
  NoValidGrasps,
  EmptySelection,
  EmptyInput,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` carries the error category
/// so callers (the CLI in particular) can map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace seggrasp
