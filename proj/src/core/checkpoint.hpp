#pragma once

#include <string>
#include <utility>
#include <vector>

#include "core/tensor.hpp"

namespace evatt {

// Single-file binary weight store. Layout, all integers little-endian u32:
//   magic "EVATTCKP", version, kind, meta text (key=value lines),
//   tensor count, then per tensor: name, ndim, dims, float32 data.
// A human-readable "<path>.manifest.txt" sidecar is written alongside.
struct Checkpoint {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor& tensor(const std::string& name) const;
  std::string meta_value(const std::string& key) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace evatt
