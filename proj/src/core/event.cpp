#include "core/event.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace evatt {

int EventFrame::nonzero_count() const {
  int n = 0;
  for (std::int8_t c : cells) n += (c != 0);
  return n;
}

FrameSequence bin_events(const EventStream& stream, std::int64_t t_start,
                         std::int64_t dt, int horizon_frames) {
  if (dt <= 0) fail(ErrorKind::Range, "bin interval must be positive");
  const Geometry geom = stream.geom;
  if (geom.width <= 0 || geom.height <= 0)
    fail(ErrorKind::Geometry, "stream has no geometry");

  std::int64_t last_bin = -1;
  for (const Event& e : stream.events) {
    if (e.t < t_start)
      fail(ErrorKind::Range, "event at t=" + std::to_string(e.t) +
                                 " precedes bin origin " +
                                 std::to_string(t_start));
    if (!geom.contains(e.x, e.y))
      fail(ErrorKind::Geometry,
           "event at (" + std::to_string(e.x) + "," + std::to_string(e.y) +
               ") outside " + std::to_string(geom.width) + "x" +
               std::to_string(geom.height));
    if (e.p != 1 && e.p != -1)
      fail(ErrorKind::Range, "polarity must be +1 or -1");
    last_bin = std::max(last_bin, (e.t - t_start) / dt);
  }

  int n_frames = horizon_frames;
  if (n_frames <= 0) {
    n_frames = static_cast<int>(last_bin + 1);
  } else if (last_bin >= n_frames) {
    fail(ErrorKind::Range, "event at bin " + std::to_string(last_bin) +
                               " beyond horizon of " +
                               std::to_string(n_frames) + " frames");
  }

  FrameSequence seq;
  seq.geom = geom;
  seq.dt = dt;
  seq.t_start = t_start;
  seq.frames.reserve(n_frames);
  for (int i = 0; i < n_frames; ++i) seq.frames.emplace_back(geom, i);

  // Net polarity per (bin, cell); the cell takes its sign.
  std::vector<int> net(static_cast<std::size_t>(n_frames) * geom.cells(), 0);
  for (const Event& e : stream.events) {
    std::int64_t bin = (e.t - t_start) / dt;
    net[bin * geom.cells() + e.y * geom.width + e.x] += e.p;
  }
  for (int i = 0; i < n_frames; ++i) {
    EventFrame& f = seq.frames[i];
    const int* row = net.data() + static_cast<std::size_t>(i) * geom.cells();
    for (int c = 0; c < geom.cells(); ++c)
      f.cells[c] = row[c] > 0 ? 1 : (row[c] < 0 ? -1 : 0);
  }
  return seq;
}

NoiseResult inject_noise(const EventFrame& frame, double noise_level,
                         std::uint64_t seed) {
  if (noise_level < 0)
    fail(ErrorKind::Range, "noise level must be non-negative");

  NoiseResult result;
  result.frame = frame;
  if (noise_level == 0) return result;

  const int nonzero = frame.nonzero_count();
  int want = static_cast<int>(std::ceil(noise_level * nonzero));
  if (want == 0) return result;

  std::vector<int> zero_cells;
  zero_cells.reserve(frame.cells.size());
  for (int c = 0; c < static_cast<int>(frame.cells.size()); ++c)
    if (frame.cells[c] == 0) zero_cells.push_back(c);

  if (want > static_cast<int>(zero_cells.size())) {
    want = static_cast<int>(zero_cells.size());
    result.saturated = true;
  }

  auto rng = make_rng(seed);
  std::shuffle(zero_cells.begin(), zero_cells.end(), rng);
  for (int i = 0; i < want; ++i) {
    // polarity drawn per cell in shuffled order, so prefixes stay stable
    int p = (rng() & 1) ? 1 : -1;
    result.frame.cells[zero_cells[i]] = static_cast<std::int8_t>(p);
  }
  result.added = want;
  return result;
}

}  // namespace evatt
