#include "core/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/aer_io.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace evatt {

namespace {

void reflect_axis(double& pos, double& vel, double lo, double hi) {
  if (pos < lo) {
    pos = 2 * lo - pos;
    vel = -vel;
  } else if (pos > hi) {
    pos = 2 * hi - pos;
    vel = -vel;
  }
}

}  // namespace

Scene step_scene(const Scene& scene) {
  Scene next = scene;
  for (Ball& b : next.balls) {
    b.cx += b.vx;
    b.cy += b.vy;
    reflect_axis(b.cx, b.vx, b.radius, scene.geom.width - b.radius);
    reflect_axis(b.cy, b.vy, b.radius, scene.geom.height - b.radius);
  }
  for (Sprite& s : next.sprites) {
    s.cx += s.vx;
    s.cy += s.vy;
    reflect_axis(s.cx, s.vx, s.width / 2.0, scene.geom.width - s.width / 2.0);
    reflect_axis(s.cy, s.vy, s.height / 2.0,
                 scene.geom.height - s.height / 2.0);
  }
  // Pairwise equal-mass exchange; only for approaching pairs so a contact
  // resolved this step does not re-trigger next step.
  for (std::size_t i = 0; i < next.balls.size(); ++i) {
    for (std::size_t j = i + 1; j < next.balls.size(); ++j) {
      Ball& a = next.balls[i];
      Ball& b = next.balls[j];
      const double dx = b.cx - a.cx, dy = b.cy - a.cy;
      const double dist2 = dx * dx + dy * dy;
      const double reach = a.radius + b.radius;
      if (dist2 > reach * reach) continue;
      const double approach = (b.vx - a.vx) * dx + (b.vy - a.vy) * dy;
      if (approach >= 0) continue;
      std::swap(a.vx, b.vx);
      std::swap(a.vy, b.vy);
    }
  }
  return next;
}

IntensityFrame render(const Scene& scene) {
  IntensityFrame frame(scene.geom, scene.bg_intensity);
  for (const Ball& b : scene.balls) {
    const int x0 = std::max(0, static_cast<int>(std::floor(b.cx - b.radius)));
    const int x1 = std::min(scene.geom.width - 1,
                            static_cast<int>(std::ceil(b.cx + b.radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(b.cy - b.radius)));
    const int y1 = std::min(scene.geom.height - 1,
                            static_cast<int>(std::ceil(b.cy + b.radius)));
    const double r2 = b.radius * b.radius;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5 - b.cx;
        const double py = y + 0.5 - b.cy;
        if (px * px + py * py <= r2) frame.at(x, y) = scene.obj_intensity;
      }
    }
  }
  for (const Sprite& s : scene.sprites) {
    const int x0 = static_cast<int>(std::floor(s.cx - s.width / 2.0 + 0.5));
    const int y0 = static_cast<int>(std::floor(s.cy - s.height / 2.0 + 0.5));
    for (int i = 0; i < s.height; ++i) {
      for (int j = 0; j < s.width; ++j) {
        if (!s.mask[i * s.width + j]) continue;
        const int x = x0 + j, y = y0 + i;
        if (scene.geom.contains(x, y)) frame.at(x, y) = scene.obj_intensity;
      }
    }
  }
  return frame;
}

std::vector<Event> intensity_to_events(const IntensityFrame& prev,
                                       const IntensityFrame& next,
                                       double th_log, std::int64_t t) {
  if (!(prev.geom == next.geom))
    fail(ErrorKind::Dimension, "intensity frame geometries differ");
  std::vector<Event> events;
  for (int y = 0; y < prev.geom.height; ++y) {
    for (int x = 0; x < prev.geom.width; ++x) {
      const double a = prev.at(x, y), b = next.at(x, y);
      if (a <= 0 || b <= 0)
        fail(ErrorKind::Range, "intensity must be positive");
      const double d = std::log(b) - std::log(a);
      if (d > th_log)
        events.push_back(Event{t, x, y, +1});
      else if (-d > th_log)
        events.push_back(Event{t, x, y, -1});
    }
  }
  return events;
}

double boundary_distance(const Scene& scene, int x, int y) {
  const double px = x + 0.5, py = y + 0.5;
  double best = std::numeric_limits<double>::infinity();
  for (const Ball& b : scene.balls) {
    const double d = std::hypot(px - b.cx, py - b.cy);
    best = std::min(best, std::abs(d - b.radius));
  }
  for (const Sprite& s : scene.sprites) {
    const int x0 = static_cast<int>(std::floor(s.cx - s.width / 2.0 + 0.5));
    const int y0 = static_cast<int>(std::floor(s.cy - s.height / 2.0 + 0.5));
    for (int i = 0; i < s.height; ++i) {
      for (int j = 0; j < s.width; ++j) {
        if (!s.mask[i * s.width + j]) continue;
        // boundary pixel: any 4-neighbour empty or outside the bitmap
        bool edge = i == 0 || j == 0 || i == s.height - 1 || j == s.width - 1 ||
                    !s.mask[(i - 1) * s.width + j] ||
                    !s.mask[(i + 1) * s.width + j] ||
                    !s.mask[i * s.width + j - 1] ||
                    !s.mask[i * s.width + j + 1];
        if (!edge) continue;
        best = std::min(best, std::hypot(px - (x0 + j + 0.5),
                                         py - (y0 + i + 0.5)));
      }
    }
  }
  return best;
}

namespace {

Scene random_scene(const DatasetConfig& cfg, std::mt19937_64& rng) {
  Scene scene;
  scene.geom = cfg.geom;
  scene.bg_intensity = cfg.bg_intensity;
  scene.obj_intensity = cfg.obj_intensity;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2 * 3.14159265358979323846);

  Sprite sprite_proto;
  if (!cfg.sprite_path.empty()) {
    GrayImage img = read_pgm(cfg.sprite_path);
    sprite_proto.width = img.width;
    sprite_proto.height = img.height;
    sprite_proto.mask.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      sprite_proto.mask[i] = img.pixels[i] > 127;
  }

  const int objects = cfg.sprite_path.empty() ? cfg.balls : cfg.sprite_count;
  for (int k = 0; k < objects; ++k) {
    const double speed =
        cfg.speed_min + (cfg.speed_max - cfg.speed_min) * unit(rng);
    const double dir = angle(rng);
    if (!cfg.sprite_path.empty()) {
      Sprite s = sprite_proto;
      const double mx = s.width / 2.0 + 1, my = s.height / 2.0 + 1;
      s.cx = mx + (cfg.geom.width - 2 * mx) * unit(rng);
      s.cy = my + (cfg.geom.height - 2 * my) * unit(rng);
      s.vx = speed * std::cos(dir);
      s.vy = speed * std::sin(dir);
      scene.sprites.push_back(s);
      continue;
    }
    const double radius =
        cfg.radius_min + (cfg.radius_max - cfg.radius_min) * unit(rng);
    Ball b;
    b.radius = radius;
    b.vx = speed * std::cos(dir);
    b.vy = speed * std::sin(dir);
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      b.cx = radius + 1 + (cfg.geom.width - 2 * (radius + 1)) * unit(rng);
      b.cy = radius + 1 + (cfg.geom.height - 2 * (radius + 1)) * unit(rng);
      placed = true;
      for (const Ball& other : scene.balls) {
        const double gap = std::hypot(b.cx - other.cx, b.cy - other.cy);
        if (gap < b.radius + other.radius + 2) {
          placed = false;
          break;
        }
      }
    }
    if (!placed)
      fail(ErrorKind::Config, "cannot place balls without overlap; "
                              "geometry too small for the requested radii");
    scene.balls.push_back(b);
  }
  return scene;
}

}  // namespace

std::vector<const SequenceRecord*> Dataset::split(bool train) const {
  std::vector<const SequenceRecord*> out;
  for (const SequenceRecord& s : sequences)
    if (s.train == train) out.push_back(&s);
  return out;
}

Dataset generate_dataset(const DatasetConfig& config) {
  if (config.sequences <= 0 || config.frames_per_sequence <= 0)
    fail(ErrorKind::Config, "dataset needs positive sequence count and length");

  Dataset ds;
  ds.config = config;
  ds.sequences.reserve(config.sequences);

  for (int id = 0; id < config.sequences; ++id) {
    SequenceRecord rec;
    rec.id = id;
    rec.train = (id % 2 == 0);
    rec.seed = mix_seed(config.seed, static_cast<std::uint64_t>(id));
    auto rng = make_rng(rec.seed);

    Scene scene = random_scene(config, rng);
    rec.states.reserve(config.frames_per_sequence + 1);
    rec.states.push_back(scene);
    rec.events.geom = config.geom;

    IntensityFrame prev = render(scene);
    for (int i = 0; i < config.frames_per_sequence; ++i) {
      scene = step_scene(scene);
      rec.states.push_back(scene);
      IntensityFrame next = render(scene);
      // events of transition i land mid-bin so they fall squarely in frame i
      std::vector<Event> ev = intensity_to_events(
          prev, next, config.th_log, i * config.dt + config.dt / 2);
      rec.events.events.insert(rec.events.events.end(), ev.begin(), ev.end());
      prev = std::move(next);
    }
    rec.frames =
        bin_events(rec.events, 0, config.dt, config.frames_per_sequence);
    ds.sequences.push_back(std::move(rec));
  }
  return ds;
}

ShiftedBallPair shifted_ball_pair(double offset_fraction,
                                  std::uint64_t seed) {
  if (offset_fraction < 0)
    fail(ErrorKind::Range, "offset fraction must be non-negative");
  const Geometry geom{128, 128};
  const double radius = 16.0, speed = 4.0, noise = 1.0 / 3.0;
  const double th_log = 0.3;

  auto motion_frame = [&](double cx_shift) {
    Scene before;
    before.geom = geom;
    before.balls.push_back(
        {64.0 - speed / 2 + cx_shift, 64.0, speed, 0.0, radius});
    Scene after = before;
    after.balls[0].cx += speed;
    EventFrame frame(geom);
    for (const Event& e :
         intensity_to_events(render(before), render(after), th_log, 0))
      frame.at(e.x, e.y) = static_cast<std::int8_t>(e.p);
    return frame;
  };

  ShiftedBallPair pair;
  pair.reference =
      inject_noise(motion_frame(0.0), noise, mix_seed(seed, 1)).frame;
  pair.shifted =
      inject_noise(motion_frame(offset_fraction * radius), noise,
                   mix_seed(seed, 2))
          .frame;
  return pair;
}

}  // namespace evatt
