#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "core/aer_io.hpp"
#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/scene.hpp"

using namespace evatt;

namespace {

std::string temp_path(const std::string& leaf) {
  return (std::filesystem::temp_directory_path() / leaf).string();
}

}  // namespace

TEST_CASE("wall contact reflects position and velocity") {
  Scene s;
  s.geom = {20, 20};
  s.balls.push_back({5, 10, -4, 0, 3});
  Scene n = step_scene(s);
  // cx would be 1, below the radius-3 wall margin: mirrored to 5, vx flips.
  CHECK(n.balls[0].cx == doctest::Approx(5.0));
  CHECK(n.balls[0].vx == doctest::Approx(4.0));
  CHECK(n.balls[0].cy == doctest::Approx(10.0));

  Scene r;
  r.geom = {20, 20};
  r.balls.push_back({16, 10, 4, 0, 3});
  Scene rn = step_scene(r);  // 20 > hi=17 -> 14, vx flips
  CHECK(rn.balls[0].cx == doctest::Approx(14.0));
  CHECK(rn.balls[0].vx == doctest::Approx(-4.0));
}

TEST_CASE("free flight is straight") {
  Scene s;
  s.geom = {64, 64};
  s.balls.push_back({30, 30, 1.5, -2.0, 5});
  Scene n = step_scene(s);
  CHECK(n.balls[0].cx == doctest::Approx(31.5));
  CHECK(n.balls[0].cy == doctest::Approx(28.0));
  CHECK(n.balls[0].vx == doctest::Approx(1.5));
  CHECK(n.balls[0].vy == doctest::Approx(-2.0));
}

TEST_CASE("approaching balls exchange velocities on contact") {
  Scene s;
  s.geom = {40, 40};
  s.balls.push_back({8, 10, 1, 0, 2});
  s.balls.push_back({12, 10, -1, 0, 2});
  Scene n = step_scene(s);  // gap 2 < reach 4 and closing -> swap
  CHECK(n.balls[0].vx == doctest::Approx(-1.0));
  CHECK(n.balls[1].vx == doctest::Approx(1.0));

  // Same overlap but already receding: no swap, they separate.
  Scene r = n;
  Scene rn = step_scene(r);
  CHECK(rn.balls[0].vx == doctest::Approx(-1.0));
  CHECK(rn.balls[1].vx == doctest::Approx(1.0));
}

TEST_CASE("render rasterizes pixel centers against the disc") {
  Scene s;
  s.geom = {9, 9};
  s.bg_intensity = 0.2;
  s.obj_intensity = 0.8;
  s.balls.push_back({4.5, 4.5, 0, 0, 1.5});
  IntensityFrame f = render(s);
  int lit = 0;
  for (double v : f.values) lit += (v == 0.8);
  CHECK(lit == 9);  // 3x3 block: corner centers at distance sqrt(2) < 1.5
  CHECK(f.at(4, 4) == 0.8);
  CHECK(f.at(3, 3) == 0.8);
  CHECK(f.at(2, 4) == 0.2);
  CHECK(f.at(0, 0) == 0.2);
}

TEST_CASE("dvs conversion thresholds the log intensity ratio") {
  IntensityFrame a({4, 1}, 0.2), b({4, 1}, 0.2);
  b.at(0, 0) = 0.8;  // log ratio log(4) ~ 1.386
  b.at(1, 0) = 0.05; // log ratio -log(4)
  auto ev = intensity_to_events(a, b, 0.3, 77);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].x == 0);
  CHECK(ev[0].p == 1);
  CHECK(ev[0].t == 77);
  CHECK(ev[1].x == 1);
  CHECK(ev[1].p == -1);

  // No change -> no events.
  CHECK(intensity_to_events(a, a, 0.3, 0).empty());
  // Exactly at the threshold -> no event (strict inequality).
  IntensityFrame one({1, 1}, 1.0), two({1, 1}, 2.0);
  CHECK(intensity_to_events(one, two, std::log(2.0), 0).empty());
  CHECK(intensity_to_events(one, two, std::nextafter(std::log(2.0), 0.0), 0)
            .size() == 1);

  IntensityFrame bad({1, 1}, 0.0);
  CHECK_THROWS_AS(intensity_to_events(bad, one, 0.3, 0), Error);
  IntensityFrame other_geom({2, 1}, 1.0);
  CHECK_THROWS_AS(intensity_to_events(one, other_geom, 0.3, 0), Error);
}

TEST_CASE("boundary distance measures to the nearest contour") {
  Scene s;
  s.geom = {21, 21};
  s.balls.push_back({10.5, 10.5, 0, 0, 3});
  CHECK(boundary_distance(s, 10, 10) == doctest::Approx(3.0));   // center
  CHECK(boundary_distance(s, 13, 10) == doctest::Approx(0.0));   // on the rim
  CHECK(boundary_distance(s, 17, 10) == doctest::Approx(4.0));   // outside
}

TEST_CASE("dataset generation is deterministic and splits by parity") {
  DatasetConfig cfg;
  cfg.geom = {32, 32};
  cfg.sequences = 6;
  cfg.frames_per_sequence = 8;
  cfg.seed = 99;
  cfg.balls = 2;
  cfg.radius_min = 3;
  cfg.radius_max = 4;

  Dataset d1 = generate_dataset(cfg);
  Dataset d2 = generate_dataset(cfg);
  REQUIRE(d1.sequences.size() == 6);
  CHECK(d1.split(true).size() == 3);
  CHECK(d1.split(false).size() == 3);

  for (int i = 0; i < 6; ++i) {
    const SequenceRecord& a = d1.sequences[i];
    const SequenceRecord& b = d2.sequences[i];
    CHECK(a.train == (i % 2 == 0));
    CHECK(a.seed == b.seed);
    REQUIRE(a.events.events.size() == b.events.events.size());
    for (std::size_t e = 0; e < a.events.events.size(); ++e) {
      CHECK(a.events.events[e].t == b.events.events[e].t);
      CHECK(a.events.events[e].x == b.events.events[e].x);
      CHECK(a.events.events[e].y == b.events.events[e].y);
      CHECK(a.events.events[e].p == b.events.events[e].p);
    }
    REQUIRE(a.frames.count() == 8);
    REQUIRE(a.states.size() == 9);
    for (int f = 0; f < 8; ++f) CHECK(a.frames.frames[f] == b.frames.frames[f]);
  }

  DatasetConfig other = cfg;
  other.seed = 100;
  Dataset d3 = generate_dataset(other);
  bool any_diff = false;
  for (int i = 0; i < 6 && !any_diff; ++i)
    any_diff = !(d3.sequences[i].frames.frames[0] ==
                 d1.sequences[i].frames.frames[0]);
  CHECK(any_diff);
}

TEST_CASE("dataset event timestamps land mid-bin") {
  DatasetConfig cfg;
  cfg.geom = {32, 32};
  cfg.sequences = 1;
  cfg.frames_per_sequence = 5;
  cfg.seed = 3;
  cfg.balls = 1;
  cfg.radius_min = 4;
  cfg.radius_max = 4;
  Dataset d = generate_dataset(cfg);
  const SequenceRecord& rec = d.sequences[0];
  CHECK(!rec.events.events.empty());
  for (const Event& e : rec.events.events) {
    const std::int64_t within = e.t % cfg.dt;
    CHECK(within == cfg.dt / 2);
    CHECK(e.t / cfg.dt < 5);
  }
  // Frames reproduce an independent re-binning of the stream.
  FrameSequence rebinned = bin_events(rec.events, 0, cfg.dt, 5);
  for (int f = 0; f < 5; ++f) CHECK(rec.frames.frames[f] == rebinned.frames[f]);
}

TEST_CASE("moving objects emit events") {
  DatasetConfig cfg;
  cfg.geom = {64, 64};
  cfg.sequences = 2;
  cfg.frames_per_sequence = 10;
  cfg.seed = 17;
  Dataset d = generate_dataset(cfg);
  for (const SequenceRecord& rec : d.sequences) {
    int nonzero_frames = 0;
    for (const EventFrame& f : rec.frames.frames)
      nonzero_frames += (f.nonzero_count() > 0);
    CHECK(nonzero_frames == 10);  // speed >= 1.2 px/frame always fires pixels
  }
}

TEST_CASE("sprite datasets bounce bitmaps instead of balls") {
  // 8x8 hollow square sprite.
  GrayImage img;
  img.width = 8;
  img.height = 8;
  img.pixels.assign(64, 0);
  for (int i = 0; i < 8; ++i) {
    img.pixels[i] = 255;
    img.pixels[56 + i] = 255;
    img.pixels[i * 8] = 255;
    img.pixels[i * 8 + 7] = 255;
  }
  const std::string sprite_path = temp_path("evatt_test_sprite.pgm");
  write_pgm(img, sprite_path);

  DatasetConfig cfg;
  cfg.geom = {48, 48};
  cfg.sequences = 2;
  cfg.frames_per_sequence = 6;
  cfg.seed = 21;
  cfg.sprite_path = sprite_path;
  cfg.sprite_count = 2;
  Dataset d = generate_dataset(cfg);
  Dataset d2 = generate_dataset(cfg);
  for (int i = 0; i < 2; ++i) {
    CHECK(d.sequences[i].states[0].sprites.size() == 2);
    CHECK(d.sequences[i].states[0].balls.empty());
    int events = 0;
    for (const EventFrame& f : d.sequences[i].frames.frames)
      events += f.nonzero_count();
    CHECK(events > 0);
    for (int f = 0; f < 6; ++f)
      CHECK(d.sequences[i].frames.frames[f] == d2.sequences[i].frames.frames[f]);
  }
  std::remove(sprite_path.c_str());
}

TEST_CASE("aer files round-trip") {
  EventStream s;
  s.geom = {16, 12};
  s.events = {{0, 0, 0, 1}, {1500, 15, 11, -1}, {99999, 7, 3, 1}};
  const std::string path = temp_path("evatt_test_roundtrip.aer");
  write_aer(s, path);
  EventStream r = read_aer(path);
  CHECK(r.geom == s.geom);
  REQUIRE(r.events.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.events[i].t == s.events[i].t);
    CHECK(r.events[i].x == s.events[i].x);
    CHECK(r.events[i].y == s.events[i].y);
    CHECK(r.events[i].p == s.events[i].p);
  }
  std::remove(path.c_str());
}

TEST_CASE("aer parser rejects malformed input") {
  const std::string path = temp_path("evatt_test_bad.aer");
  auto write_text = [&](const std::string& text) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    REQUIRE(f);
    std::fputs(text.c_str(), f);
    std::fclose(f);
  };

  write_text("1,2,3,1\n");  // no header
  CHECK_THROWS_AS(read_aer(path), Error);
  write_text("# aer v1 W=4 H=4\n1,2,3,2\n");  // bad polarity
  CHECK_THROWS_AS(read_aer(path), Error);
  write_text("# aer v1 W=4 H=4\n1,9,0,1\n");  // outside geometry
  CHECK_THROWS_AS(read_aer(path), Error);
  write_text("# aer v1 W=4 H=4\n1,1,1\n");  // missing field
  CHECK_THROWS_AS(read_aer(path), Error);
  write_text("# aer v1 W=4 H=4\n-5,1,1,1\n");  // negative timestamp
  CHECK_THROWS_AS(read_aer(path), Error);
  write_text("");  // empty
  CHECK_THROWS_AS(read_aer(path), Error);
  write_text("# aer v1 W=4 H=4\n# comment\n\n5,1,1,1\n");  // comments ok
  CHECK(read_aer(path).events.size() == 1);
  std::remove(path.c_str());
}

TEST_CASE("pgm round-trip and frame rendering") {
  GrayImage img;
  img.width = 3;
  img.height = 2;
  img.pixels = {0, 128, 255, 10, 20, 30};
  const std::string path = temp_path("evatt_test_img.pgm");
  write_pgm(img, path);
  GrayImage r = read_pgm(path);
  CHECK(r.width == 3);
  CHECK(r.height == 2);
  CHECK(r.pixels == img.pixels);

  EventFrame f({2, 2});
  f.at(0, 0) = 1;
  f.at(1, 1) = -1;
  write_frame_pgm(f, path);
  GrayImage fr = read_pgm(path);
  CHECK(fr.pixels[0] == 255);
  CHECK(fr.pixels[1] == 128);
  CHECK(fr.pixels[2] == 128);
  CHECK(fr.pixels[3] == 0);
  std::remove(path.c_str());
}

TEST_CASE("shifted ball pair is deterministic and degrades with offset") {
  ShiftedBallPair p0 = shifted_ball_pair(0.0, 11);
  ShiftedBallPair p0b = shifted_ball_pair(0.0, 11);
  CHECK(p0.reference == p0b.reference);
  CHECK(p0.shifted == p0b.shifted);
  CHECK(p0.reference.geom.width == 128);

  // Identical geometry, independent noise: high but imperfect agreement.
  const double e0 = esim(p0.reference, p0.shifted).value;
  CHECK(e0 > 0.4);
  CHECK(e0 < 1.0);

  ShiftedBallPair p25 = shifted_ball_pair(0.25, 11);
  const double e25 = esim(p25.reference, p25.shifted).value;
  CHECK(e25 < e0 - 0.5);

  // Region polarization tolerates the noise at zero offset.
  CHECK(region_esim(p0.reference, p0.shifted, 4).value >
        region_esim(p0.reference, p0.shifted, 2).value);
  CHECK(region_esim(p0.reference, p0.shifted, 2).value > e0);

  CHECK_THROWS_AS(shifted_ball_pair(-0.1, 1), Error);
}
