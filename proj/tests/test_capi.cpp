#include <doctest.h>

#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "evatt.h"

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("evatt_capi_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string str() const { return path.string(); }
  std::string file(const std::string& leaf) const {
    return (path / leaf).string();
  }
};

evatt_frame* frame_of(int w, int h, const std::vector<int8_t>& cells) {
  evatt_frame* f = nullptr;
  REQUIRE(evatt_frame_from_cells(w, h, cells.data(), &f) == EVATT_OK);
  return f;
}

}  // namespace

TEST_CASE("version and error text are always available") {
  REQUIRE(evatt_version() != nullptr);
  CHECK(std::strlen(evatt_version()) > 0);
  REQUIRE(evatt_last_error() != nullptr);
}

TEST_CASE("frames round-trip through the handle interface") {
  evatt_frame* f = nullptr;
  REQUIRE(evatt_frame_create(3, 2, &f) == EVATT_OK);
  int w = 0, h = 0;
  REQUIRE(evatt_frame_size(f, &w, &h) == EVATT_OK);
  CHECK(w == 3);
  CHECK(h == 2);
  int nz = -1;
  REQUIRE(evatt_frame_nonzero_count(f, &nz) == EVATT_OK);
  CHECK(nz == 0);
  evatt_frame_destroy(f);

  std::vector<int8_t> cells = {1, 0, -1, 0, 1, 0};
  evatt_frame* g = frame_of(3, 2, cells);
  std::vector<int8_t> out(6, 99);
  REQUIRE(evatt_frame_cells(g, out.data()) == EVATT_OK);
  CHECK(out == cells);
  REQUIRE(evatt_frame_nonzero_count(g, &nz) == EVATT_OK);
  CHECK(nz == 3);
  evatt_frame_destroy(g);

  // Bad cell values and bad geometry are rejected with a message.
  std::vector<int8_t> bad = {2, 0, 0, 0};
  evatt_frame* none = nullptr;
  CHECK(evatt_frame_from_cells(2, 2, bad.data(), &none) != EVATT_OK);
  CHECK(std::strlen(evatt_last_error()) > 0);
  CHECK(none == nullptr);
  CHECK(evatt_frame_create(0, 4, &none) != EVATT_OK);
  CHECK(evatt_frame_create(4, 4, nullptr) == EVATT_ERR_INVALID);
}

TEST_CASE("similarity metrics match their library values") {
  evatt_frame* a = frame_of(2, 2, {1, 0, 0, -1});
  evatt_frame* b = frame_of(2, 2, {1, 0, 0, -1});
  evatt_frame* c = frame_of(2, 2, {0, 1, -1, 0});

  double v = -1;
  REQUIRE(evatt_esim(a, b, &v) == EVATT_OK);
  CHECK(v == doctest::Approx(1.0));
  REQUIRE(evatt_esim(a, c, &v) == EVATT_OK);
  CHECK(v == doctest::Approx(0.0));
  REQUIRE(evatt_mss(a, b, &v) == EVATT_OK);
  CHECK(v == doctest::Approx(1.0));
  REQUIRE(evatt_mss(a, c, &v) == EVATT_OK);
  CHECK(v == doctest::Approx(0.0));  // mse = 4/4 -> 1 - 1
  REQUIRE(evatt_region_esim(a, c, 2, &v) == EVATT_OK);
  CHECK(v == doctest::Approx(1.0));  // both polarize to all-zero at n=2

  REQUIRE(evatt_relative_esim(0.3, 0.6, &v) == EVATT_OK);
  CHECK(v == doctest::Approx(0.5));
  CHECK(evatt_relative_esim(0.3, 0.0, &v) == EVATT_ERR_RANGE);

  evatt_frame* wide = nullptr;
  REQUIRE(evatt_frame_create(3, 2, &wide) == EVATT_OK);
  CHECK(evatt_esim(a, wide, &v) == EVATT_ERR_DIMENSION);
  CHECK(evatt_region_esim(a, c, 0, &v) == EVATT_ERR_RANGE);

  evatt_frame_destroy(a);
  evatt_frame_destroy(b);
  evatt_frame_destroy(c);
  evatt_frame_destroy(wide);
}

TEST_CASE("noise injection adds the contracted number of events") {
  std::vector<int8_t> cells(64, 0);
  for (int i = 0; i < 10; ++i) cells[i * 6] = (i % 2) ? 1 : -1;
  evatt_frame* f = frame_of(8, 8, cells);
  evatt_frame* noisy = nullptr;
  REQUIRE(evatt_inject_noise(f, 0.5, 42, &noisy) == EVATT_OK);
  int before = 0, after = 0;
  evatt_frame_nonzero_count(f, &before);
  evatt_frame_nonzero_count(noisy, &after);
  CHECK(before == 10);
  CHECK(after == 15);  // ceil(0.5 * 10) added on empty cells

  evatt_frame* again = nullptr;
  REQUIRE(evatt_inject_noise(f, 0.5, 42, &again) == EVATT_OK);
  std::vector<int8_t> x(64), y(64);
  evatt_frame_cells(noisy, x.data());
  evatt_frame_cells(again, y.data());
  CHECK(x == y);

  evatt_frame* bad = nullptr;
  CHECK(evatt_inject_noise(f, -0.5, 1, &bad) == EVATT_ERR_RANGE);
  evatt_frame_destroy(f);
  evatt_frame_destroy(noisy);
  evatt_frame_destroy(again);
}

TEST_CASE("streams build, persist and bin through the interface") {
  TempDir tmp("stream");
  const std::vector<int64_t> t = {100, 900, 1100, 2500};
  const std::vector<int32_t> x = {0, 1, 2, 3};
  const std::vector<int32_t> y = {0, 0, 1, 1};
  const std::vector<int32_t> p = {1, -1, 1, 1};

  evatt_stream* s = nullptr;
  REQUIRE(evatt_stream_from_events(4, 2, t.data(), x.data(), y.data(), p.data(),
                                   4, &s) == EVATT_OK);
  size_t count = 0;
  REQUIRE(evatt_stream_count(s, &count) == EVATT_OK);
  CHECK(count == 4);

  const std::string path = tmp.file("events.aer");
  REQUIRE(evatt_stream_write_aer(s, path.c_str()) == EVATT_OK);
  evatt_stream* r = nullptr;
  REQUIRE(evatt_stream_read_aer(path.c_str(), &r) == EVATT_OK);
  REQUIRE(evatt_stream_count(r, &count) == EVATT_OK);
  CHECK(count == 4);

  // Bin 0 covers [0, 1000): two events; bin 2 covers [2000, 3000): one.
  evatt_frame* f0 = nullptr;
  REQUIRE(evatt_bin_frame(r, 0, 1000, 0, &f0) == EVATT_OK);
  int nz = 0;
  evatt_frame_nonzero_count(f0, &nz);
  CHECK(nz == 2);
  evatt_frame* f2 = nullptr;
  REQUIRE(evatt_bin_frame(r, 0, 1000, 2, &f2) == EVATT_OK);
  evatt_frame_nonzero_count(f2, &nz);
  CHECK(nz == 1);
  // Past the last event: an empty frame, not an error.
  evatt_frame* f9 = nullptr;
  REQUIRE(evatt_bin_frame(r, 0, 1000, 9, &f9) == EVATT_OK);
  evatt_frame_nonzero_count(f9, &nz);
  CHECK(nz == 0);
  evatt_frame* bad = nullptr;
  CHECK(evatt_bin_frame(r, 0, 0, 0, &bad) == EVATT_ERR_RANGE);
  CHECK(evatt_bin_frame(r, 0, 1000, -1, &bad) == EVATT_ERR_RANGE);

  evatt_frame_destroy(f0);
  evatt_frame_destroy(f2);
  evatt_frame_destroy(f9);
  evatt_stream_destroy(s);
  evatt_stream_destroy(r);

  // Invalid polarity is rejected at construction.
  const std::vector<int32_t> bad_p = {0, 1, 1, 1};
  evatt_stream* none = nullptr;
  CHECK(evatt_stream_from_events(4, 2, t.data(), x.data(), y.data(),
                                 bad_p.data(), 4, &none) != EVATT_OK);
  CHECK(evatt_stream_read_aer(tmp.file("missing.aer").c_str(), &none) !=
        EVATT_OK);
}

TEST_CASE("config and command surface drives a full tiny pipeline") {
  TempDir tmp("pipeline");
  evatt_config* cfg = nullptr;
  REQUIRE(evatt_config_create(&cfg) == EVATT_OK);
  auto set = [&](const char* k, const std::string& v) {
    REQUIRE(evatt_config_set(cfg, k, v.c_str()) == EVATT_OK);
  };
  set("main.seed", "7");
  set("main.out_root", tmp.str());
  set("dataset.width", "16");
  set("dataset.height", "16");
  set("dataset.sequences", "6");
  set("dataset.frames", "10");
  set("dataset.balls", "1");
  set("dataset.radius_min", "2.5");
  set("dataset.radius_max", "3.0");
  set("predictor.encoder", "4,8");
  set("predictor.residual_blocks", "1");
  set("predictor.decoder", "4");
  set("predictor.epochs", "2");
  set("predictor.batch", "2");
  set("predictor.window", "4");
  set("predictor.val_sequences", "2");
  set("evaluator.channels", "4,8");
  set("evaluator.steps", "4");
  set("evaluator.anchors", "3,6");
  set("evaluator.max_horizon", "3");
  set("evaluator.epochs", "2");
  set("attention.sequences", "2");
  set("attention.theta", "0.5");
  set("compare.thresholds", "0.5");
  set("compare.seeds", "1");
  set("compare.sequences", "2");

  REQUIRE(evatt_cmd_gen_data(cfg) == EVATT_OK);
  CHECK(std::filesystem::exists(tmp.path / "dataset" / "manifest.csv"));
  REQUIRE(evatt_cmd_train(cfg, "predictor") == EVATT_OK);
  CHECK(std::filesystem::exists(tmp.path / "predictor.ckpt"));
  REQUIRE(evatt_cmd_train(cfg, "evaluator") == EVATT_OK);
  CHECK(std::filesystem::exists(tmp.path / "evaluator.ckpt"));
  CHECK(evatt_cmd_train(cfg, "nonsense") == EVATT_ERR_CONFIG);
  REQUIRE(evatt_cmd_run_attention(cfg) == EVATT_OK);
  REQUIRE(evatt_cmd_compare(cfg) == EVATT_OK);
  CHECK(std::filesystem::exists(tmp.path / "compare.csv"));

  // The trained predictor loads back through the inference handles.
  evatt_predictor* predictor = nullptr;
  REQUIRE(evatt_predictor_load((tmp.path / "predictor.ckpt").string().c_str(),
                               &predictor) == EVATT_OK);
  int w = 0, h = 0;
  REQUIRE(evatt_predictor_geometry(predictor, &w, &h) == EVATT_OK);
  CHECK(w == 16);
  CHECK(h == 16);

  std::vector<int8_t> cells(256, 0);
  cells[0] = 1;
  cells[100] = -1;
  evatt_frame* input = frame_of(16, 16, cells);
  evatt_frame* pred = nullptr;
  REQUIRE(evatt_predictor_step(predictor, input, &pred) == EVATT_OK);
  int pw = 0, ph = 0;
  evatt_frame_size(pred, &pw, &ph);
  CHECK(pw == 16);
  CHECK(ph == 16);

  std::vector<double> probs(3 * 256, -1);
  REQUIRE(evatt_predictor_probs(predictor, probs.data()) == EVATT_OK);
  for (int i = 0; i < 256; ++i) {
    const double sum = probs[i] + probs[256 + i] + probs[512 + i];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }

  // Reset clears temporal state: same input gives the same first-step output.
  evatt_frame* pred2 = nullptr;
  REQUIRE(evatt_predictor_reset(predictor) == EVATT_OK);
  REQUIRE(evatt_predictor_step(predictor, input, &pred2) == EVATT_OK);
  std::vector<int8_t> c1(256), c2(256);
  evatt_frame_cells(pred, c1.data());
  evatt_frame_cells(pred2, c2.data());
  CHECK(c1 == c2);

  evatt_evaluator* evaluator = nullptr;
  REQUIRE(evatt_evaluator_load((tmp.path / "evaluator.ckpt").string().c_str(),
                               &evaluator) == EVATT_OK);
  double est = -1;
  REQUIRE(evatt_estimate_esim(evaluator, input, pred, &est) == EVATT_OK);
  CHECK(est >= 0.0);
  CHECK(est <= 1.0);

  // Probing the wrong checkpoint kind fails cleanly.
  evatt_predictor* moved = nullptr;
  CHECK(evatt_predictor_load((tmp.path / "evaluator.ckpt").string().c_str(),
                             &moved) != EVATT_OK);
  CHECK(std::strlen(evatt_last_error()) > 0);

  evatt_frame_destroy(input);
  evatt_frame_destroy(pred);
  evatt_frame_destroy(pred2);
  evatt_predictor_destroy(predictor);
  evatt_evaluator_destroy(evaluator);
  evatt_config_destroy(cfg);
}

TEST_CASE("commands fail with config errors when prerequisites are missing") {
  TempDir tmp("missing");
  evatt_config* cfg = nullptr;
  REQUIRE(evatt_config_create(&cfg) == EVATT_OK);
  // No main.seed pinned.
  CHECK(evatt_cmd_gen_data(cfg) == EVATT_ERR_CONFIG);
  REQUIRE(evatt_config_set(cfg, "main.seed", "1") == EVATT_OK);
  REQUIRE(evatt_config_set(cfg, "main.out_root", tmp.str().c_str()) ==
          EVATT_OK);
  // No dataset on disk yet.
  CHECK(evatt_cmd_train(cfg, "predictor") != EVATT_OK);
  CHECK(evatt_config_set(cfg, "bad-key-without-dot", "1") == EVATT_ERR_PARSE);
  evatt_config_destroy(cfg);

  evatt_config* from_file = nullptr;
  CHECK(evatt_config_load(tmp.file("nope.ini").c_str(), &from_file) ==
        EVATT_ERR_IO);
}
