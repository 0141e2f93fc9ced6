#include "core/error.hpp"

namespace evatt {

void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Range: return "range";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Diverged: return "diverged";
    case ErrorKind::Invalid: return "invalid";
  }
  return "unknown";
}

}  // namespace evatt
