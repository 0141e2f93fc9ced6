#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "core/error.hpp"

namespace evatt {

// Atomic-ish write: stream into path.tmp, then rename over path.
class AtomicFile {
 public:
  explicit AtomicFile(const std::string& path, bool binary = false)
      : path_(path), tmp_(path + ".tmp") {
    out_.open(tmp_, binary ? std::ios::binary | std::ios::out : std::ios::out);
    if (!out_) fail(ErrorKind::Io, "cannot open " + tmp_ + " for writing");
  }
  std::ofstream& stream() { return out_; }
  void commit() {
    out_.flush();
    if (!out_) fail(ErrorKind::Io, "write failed for " + tmp_);
    out_.close();
    std::error_code ec;
    std::filesystem::rename(tmp_, path_, ec);
    if (ec) fail(ErrorKind::Io, "cannot rename " + tmp_ + " to " + path_);
  }

 private:
  std::string path_, tmp_;
  std::ofstream out_;
};

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create directory " + dir);
}

}  // namespace evatt
