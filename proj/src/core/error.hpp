#pragma once

#include <stdexcept>
#include <string>

namespace evatt {

enum class ErrorKind {
  Range,      // value outside its admissible interval
  Geometry,   // coordinates outside the sensor geometry
  Parse,      // malformed input text
  Dimension,  // shape mismatch between operands
  Config,     // invalid or incomplete experiment configuration
  Io,         // filesystem failure
  Diverged,   // training produced a non-finite loss or gradient
  Invalid,    // any other contract violation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& msg);

const char* error_kind_name(ErrorKind kind);

}  // namespace evatt
