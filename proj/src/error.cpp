#include "seggrasp/error.hpp"

namespace seggrasp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::DegenerateMesh: return "DegenerateMesh";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::UnknownPrompt: return "UnknownPrompt";
    case ErrorKind::ViewMismatch: return "ViewMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyPart: return "EmptyPart";
    case ErrorKind::BadQuaternion: return "BadQuaternion";
    case ErrorKind::NoValidGrasps: return "NoValidGrasps";
    case ErrorKind::EmptySelection: return "EmptySelection";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace seggrasp
