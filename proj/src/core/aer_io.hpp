#pragma once

#include <string>
#include <vector>

#include "core/event.hpp"

namespace evatt {

// Text AER file: header "# aer v1 W=<w> H=<h>" then one "t,x,y,p" line per
// event, p in {1,-1}, LF-terminated, '#' starts a comment line.
EventStream read_aer(const std::string& path);
void write_aer(const EventStream& stream, const std::string& path);

// Portable graymap (P5) dump: -1 -> 0, 0 -> 128, +1 -> 255.
void write_frame_pgm(const EventFrame& frame, const std::string& path);

// 8-bit grayscale image, used for sprite bitmaps and frame dumps.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> pixels;  // row-major
};

GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& image, const std::string& path);

// One file per frame: <dir>/<prefix><index, 5 digits>.pgm
void dump_frames_pgm(const FrameSequence& seq, const std::string& dir,
                     const std::string& prefix = "frame_");

}  // namespace evatt
