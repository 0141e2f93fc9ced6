#pragma once

#include <cstdint>
#include <vector>

#include "core/geometry.hpp"

namespace evatt {

// One AER tuple. Polarity is +1 or -1, never 0.
struct Event {
  std::int64_t t = 0;  // microseconds
  int x = 0;
  int y = 0;
  int p = +1;
};

// Ternary array over the sensor geometry; cells hold -1, 0 or +1.
struct EventFrame {
  Geometry geom;
  int frame_index = 0;
  std::vector<std::int8_t> cells;  // row-major, origin top-left

  EventFrame() = default;
  EventFrame(Geometry g, int index = 0)
      : geom(g), frame_index(index), cells(g.cells(), 0) {}

  std::int8_t at(int x, int y) const { return cells[y * geom.width + x]; }
  std::int8_t& at(int x, int y) { return cells[y * geom.width + x]; }
  int nonzero_count() const;
  bool operator==(const EventFrame& other) const {
    return geom == other.geom && cells == other.cells;
  }
};

struct FrameSequence {
  Geometry geom;
  std::int64_t dt = 0;       // bin interval, microseconds
  std::int64_t t_start = 0;  // binning origin
  std::vector<EventFrame> frames;

  int count() const { return static_cast<int>(frames.size()); }
};

// Event list plus the sensor geometry it was recorded on.
struct EventStream {
  Geometry geom;
  std::vector<Event> events;
};

// Equal-time binning. Event e lands in frame floor((e.t - t_start) / dt);
// a cell hit by several events in one bin takes the sign of the net polarity
// sum, 0 on a tie. horizon_frames <= 0 derives the frame count from the last
// event (empty stream then yields an empty sequence).
FrameSequence bin_events(const EventStream& stream, std::int64_t t_start,
                         std::int64_t dt, int horizon_frames = 0);

struct NoiseResult {
  EventFrame frame;
  int added = 0;
  bool saturated = false;
};

// Places ceil(noise_level * nonzero_count) spurious events on uniformly
// chosen zero cells, polarity uniform in {+1,-1}. Existing cells are never
// touched. Draws are nested: the cells picked at a lower level are a prefix
// of those picked at a higher level under the same seed.
NoiseResult inject_noise(const EventFrame& frame, double noise_level,
                         std::uint64_t seed);

}  // namespace evatt
