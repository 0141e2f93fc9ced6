#pragma once

namespace evatt {

struct Geometry {
  int width = 0;
  int height = 0;

  int cells() const { return width * height; }
  bool contains(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  bool operator==(const Geometry& other) const = default;
};

}  // namespace evatt
