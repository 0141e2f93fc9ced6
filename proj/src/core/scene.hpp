#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/event.hpp"

namespace evatt {

struct Ball {
  double cx = 0, cy = 0;  // center, pixels
  double vx = 0, vy = 0;  // pixels per frame
  double radius = 0;
};

struct Sprite {
  int width = 0, height = 0;
  std::vector<std::uint8_t> mask;  // nonzero = object pixel
  double cx = 0, cy = 0;           // center position
  double vx = 0, vy = 0;
};

struct Scene {
  Geometry geom;
  std::vector<Ball> balls;
  std::vector<Sprite> sprites;
  double bg_intensity = 0.2;
  double obj_intensity = 0.8;
};

struct IntensityFrame {
  Geometry geom;
  std::vector<double> values;  // light intensity, clamped to (0, 1]

  IntensityFrame() = default;
  explicit IntensityFrame(Geometry g, double fill = 0.0)
      : geom(g), values(g.cells(), fill) {}
  double at(int x, int y) const { return values[y * geom.width + x]; }
  double& at(int x, int y) { return values[y * geom.width + x]; }
};

// Advances every object by its velocity; wall contact reflects the normal
// velocity component, ball-ball contact swaps the full velocity vectors
// (equal-mass elastic exchange).
Scene step_scene(const Scene& scene);

// Flat rasterization: object pixels get obj_intensity, the rest
// bg_intensity. No anti-aliasing; pixel centers sit at (x+0.5, y+0.5).
IntensityFrame render(const Scene& scene);

// Eq.-style DVS pixel model: emits +1 where log(next)-log(prev) > th_log,
// -1 where log(prev)-log(next) > th_log. All events carry timestamp t.
std::vector<Event> intensity_to_events(const IntensityFrame& prev,
                                       const IntensityFrame& next,
                                       double th_log, std::int64_t t);

// Distance from a pixel center to the nearest object boundary; used to
// separate contour events from spurious ones.
double boundary_distance(const Scene& scene, int x, int y);

// Noised shifted-ball measurement pair: one frame of ball motion rendered
// twice, the second displaced along the motion axis by
// offset_fraction * radius, with independent spurious noise on each frame.
// 128x128, radius 16, speed 4 px/frame, noise level 1/3.
struct ShiftedBallPair {
  EventFrame reference;
  EventFrame shifted;
};
ShiftedBallPair shifted_ball_pair(double offset_fraction, std::uint64_t seed);

struct DatasetConfig {
  Geometry geom{64, 64};
  int sequences = 200;  // split 50/50 into train/test by id parity
  int frames_per_sequence = 24;  // event frames per sequence
  std::uint64_t seed = 1;
  int balls = 3;
  double radius_min = 4.5, radius_max = 7.0;
  double speed_min = 1.2, speed_max = 2.4;
  double bg_intensity = 0.2, obj_intensity = 0.8;
  double th_log = 0.3;
  std::int64_t dt = 1000;  // microseconds per frame bin
  std::string sprite_path;  // non-empty: bounce sprites instead of balls
  int sprite_count = 2;
};

// One generated sequence: the raw event stream, its equal-time binning and
// the scene trajectory. states holds frames_per_sequence+1 entries; event
// frame i arises from the transition states[i] -> states[i+1].
struct SequenceRecord {
  int id = 0;
  bool train = false;  // even ids train, odd ids test
  std::uint64_t seed = 0;
  EventStream events;
  FrameSequence frames;
  std::vector<Scene> states;
};

struct Dataset {
  DatasetConfig config;
  std::vector<SequenceRecord> sequences;

  std::vector<const SequenceRecord*> split(bool train) const;
};

// Deterministic for a fixed config seed; sequences split 50/50 by index
// parity.
Dataset generate_dataset(const DatasetConfig& config);

}  // namespace evatt
