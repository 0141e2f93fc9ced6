#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "core/aer_io.hpp"
#include "core/checkpoint.hpp"
#include "core/commands.hpp"
#include "core/config.hpp"
#include "core/error.hpp"
#include "core/scene.hpp"

using namespace evatt;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("evatt_cmd_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Restores (or clears) an environment variable on scope exit.
struct EnvGuard {
  std::string name;
  std::string old_value;
  bool had = false;
  explicit EnvGuard(const std::string& n) : name(n) {
    const char* v = std::getenv(n.c_str());
    had = v != nullptr;
    if (had) old_value = v;
  }
  ~EnvGuard() {
    if (had)
      setenv(name.c_str(), old_value.c_str(), 1);
    else
      unsetenv(name.c_str());
  }
};

Config tiny_pipeline_config(const std::string& out_root) {
  Config cfg;
  cfg.set("main.seed", "7");
  cfg.set("main.out_root", out_root);
  cfg.set("dataset.width", "16");
  cfg.set("dataset.height", "16");
  cfg.set("dataset.sequences", "6");
  cfg.set("dataset.frames", "10");
  cfg.set("dataset.balls", "1");
  cfg.set("dataset.radius_min", "2.5");
  cfg.set("dataset.radius_max", "3.0");
  cfg.set("predictor.encoder", "4,8");
  cfg.set("predictor.residual_blocks", "1");
  cfg.set("predictor.decoder", "4");
  cfg.set("predictor.epochs", "2");
  cfg.set("predictor.batch", "2");
  cfg.set("predictor.window", "4");
  cfg.set("predictor.val_sequences", "2");
  cfg.set("evaluator.channels", "4,8");
  cfg.set("evaluator.steps", "4");
  cfg.set("evaluator.anchors", "3,6");
  cfg.set("evaluator.max_horizon", "3");
  cfg.set("evaluator.epochs", "2");
  cfg.set("attention.sequences", "2");
  cfg.set("attention.theta", "0.5");
  cfg.set("compare.thresholds", "0.5");
  cfg.set("compare.seeds", "1");
  cfg.set("compare.sequences", "2");
  return cfg;
}

}  // namespace

TEST_CASE("ini text parses into dotted keys") {
  Config cfg = Config::from_string(
      "# comment\n"
      "[main]\n"
      "seed = 42\n"
      "; another comment\n"
      "[dataset]\n"
      "  width =  128 \n"
      "name = spaced value here\n");
  CHECK(cfg.get("main.seed") == "42");
  CHECK(cfg.get_int("dataset.width") == 128);
  CHECK(cfg.get("dataset.name") == "spaced value here");
  CHECK(cfg.has("main.seed"));
  CHECK(!cfg.has("main.missing"));

  CHECK_THROWS_AS(Config::from_string("[main\nx = 1\n"), Error);
  CHECK_THROWS_AS(Config::from_string("[main]\njust a line\n"), Error);
  CHECK_THROWS_AS(Config::from_string("[main]\n= 1\n"), Error);
  CHECK_THROWS_AS(Config::from_string("[]\n"), Error);
  CHECK_THROWS_AS(Config::from_string("orphan = 1\n[main]\n"), Error);
}

TEST_CASE("typed getters convert and reject junk") {
  Config cfg = Config::from_string(
      "[a]\n"
      "int = 12\n"
      "bad_int = 12x\n"
      "dbl = 2.5\n"
      "neg = -3\n"
      "flag_t = yes\n"
      "flag_f = 0\n"
      "flag_bad = maybe\n"
      "list = 0.1,0.2,0.3\n"
      "ulist = 4,5\n"
      "bad_list = 1,zz\n");
  CHECK(cfg.get_int("a.int") == 12);
  CHECK_THROWS_AS(cfg.get_int("a.bad_int"), Error);
  CHECK(cfg.get_int_or("a.int", 99) == 12);
  CHECK(cfg.get_int_or("a.nope", 99) == 99);
  CHECK(cfg.get_double("a.dbl") == doctest::Approx(2.5));
  CHECK(cfg.get_double_or("a.nope", 1.5) == doctest::Approx(1.5));
  CHECK_THROWS_AS(cfg.get_double("a.bad_int"), Error);
  CHECK(cfg.get_bool_or("a.flag_t", false));
  CHECK(!cfg.get_bool_or("a.flag_f", true));
  CHECK(cfg.get_bool_or("a.nope", true));
  CHECK_THROWS_AS(cfg.get_bool_or("a.flag_bad", false), Error);
  CHECK(cfg.get_doubles("a.list") ==
        std::vector<double>{0.1, 0.2, 0.3});
  CHECK(cfg.get_uints("a.ulist") == std::vector<std::uint64_t>{4, 5});
  CHECK_THROWS_AS(cfg.get_doubles("a.bad_list"), Error);
  CHECK_THROWS_AS(cfg.get("a.nope"), Error);
  CHECK(cfg.get_or("a.nope", "fb") == "fb");

  // Seeds must be pinned explicitly and be non-negative.
  CHECK_THROWS_AS(cfg.get_seed("main.seed"), Error);
  CHECK(cfg.get_seed("a.int") == 12);
  CHECK_THROWS_AS(cfg.get_seed("a.neg"), Error);
}

TEST_CASE("set requires the dotted form") {
  Config cfg;
  cfg.set("a.b", "1");
  CHECK(cfg.get("a.b") == "1");
  CHECK_THROWS_AS(cfg.set("nodot", "1"), Error);
  CHECK_THROWS_AS(cfg.set(".b", "1"), Error);
  CHECK_THROWS_AS(cfg.set("a.", "1"), Error);
  CHECK_THROWS_AS(cfg.set("", "1"), Error);
}

TEST_CASE("output root resolves config, then environment, then default") {
  EnvGuard guard("EVATT_OUT_ROOT");

  Config with;
  with.set("main.out_root", "/cfg/root");
  setenv("EVATT_OUT_ROOT", "/env/root", 1);
  CHECK(resolve_out_root(with) == "/cfg/root");

  Config without;
  CHECK(resolve_out_root(without) == "/env/root");
  unsetenv("EVATT_OUT_ROOT");
  CHECK(resolve_out_root(without) == "out");
}

TEST_CASE("checkpoint files round-trip tensors and metadata") {
  TempDir tmp("ckpt");
  Checkpoint out;
  out.kind = "probe";
  out.meta = {{"alpha", "2"}, {"note", "x"}};
  Tensor w({2, 3});
  w.data = {0.5, -1.25, 3.0, 0.0, 8.0, -0.125};  // exact in float32
  out.tensors.emplace_back("w", std::move(w));
  const std::string path = (tmp.path / "probe.ckpt").string();
  save_checkpoint(out, path);
  CHECK(fs::exists(path + ".manifest.txt"));

  Checkpoint in = load_checkpoint(path);
  CHECK(in.kind == "probe");
  CHECK(in.meta_value("alpha") == "2");
  CHECK(in.meta_value("note") == "x");
  CHECK_THROWS_AS(in.meta_value("missing"), Error);
  const Tensor& back = in.tensor("w");
  CHECK(back.shape == std::vector<int>{2, 3});
  CHECK(back.data == std::vector<double>{0.5, -1.25, 3.0, 0.0, 8.0, -0.125});
  CHECK_THROWS_AS(in.tensor("nope"), Error);

  // Corrupt files are rejected.
  const std::string bad = (tmp.path / "bad.ckpt").string();
  std::ofstream(bad, std::ios::binary) << "NOTMAGIC and then some";
  CHECK_THROWS_AS(load_checkpoint(bad), Error);
  const std::string truncated = (tmp.path / "short.ckpt").string();
  std::ofstream(truncated, std::ios::binary)
      << read_file(path).substr(0, 40);
  CHECK_THROWS_AS(load_checkpoint(truncated), Error);
  CHECK_THROWS_AS(load_checkpoint((tmp.path / "absent.ckpt").string()),
                  Error);
}

TEST_CASE("generated datasets load back identically") {
  TempDir tmp("roundtrip");
  Config cfg = tiny_pipeline_config(tmp.str());
  CHECK_THROWS_AS(load_dataset(cfg), Error);  // nothing generated yet
  cmd_gen_data(cfg);

  Dataset loaded = load_dataset(cfg);
  DatasetConfig dcfg;
  dcfg.geom = {16, 16};
  dcfg.sequences = 6;
  dcfg.frames_per_sequence = 10;
  dcfg.seed = 7;
  dcfg.balls = 1;
  dcfg.radius_min = 2.5;
  dcfg.radius_max = 3.0;
  Dataset direct = generate_dataset(dcfg);

  REQUIRE(loaded.sequences.size() == direct.sequences.size());
  for (std::size_t i = 0; i < loaded.sequences.size(); ++i) {
    const SequenceRecord& a = loaded.sequences[i];
    const SequenceRecord& b = direct.sequences[i];
    CHECK(a.id == b.id);
    CHECK(a.train == b.train);
    REQUIRE(a.frames.count() == b.frames.count());
    for (int f = 0; f < a.frames.count(); ++f)
      CHECK(a.frames.frames[f] == b.frames.frames[f]);
  }

  // Manifest has a header plus one row per sequence.
  const std::string manifest =
      read_file(tmp.path / "dataset" / "manifest.csv");
  CHECK(manifest.rfind("id,file,split,seed", 0) == 0);
  CHECK(std::count(manifest.begin(), manifest.end(), '\n') == 7);
}

TEST_CASE("metrics command scores two event files pairwise") {
  TempDir tmp("pairwise");
  ShiftedBallPair pair = shifted_ball_pair(0.1, 5);
  // Persist both frames as single-bin AER streams.
  auto stream_of = [](const EventFrame& f) {
    EventStream s;
    s.geom = f.geom;
    for (int y = 0; y < f.geom.height; ++y)
      for (int x = 0; x < f.geom.width; ++x)
        if (f.at(x, y) != 0)
          s.events.push_back({500, x, y, f.at(x, y)});
    return s;
  };
  const std::string pa = (tmp.path / "a.aer").string();
  const std::string pb = (tmp.path / "b.aer").string();
  write_aer(stream_of(pair.reference), pa);
  write_aer(stream_of(pair.shifted), pb);

  Config cfg;
  cfg.set("main.seed", "1");
  cfg.set("main.out_root", tmp.str());
  cfg.set("metrics.a", pa);
  cfg.set("metrics.b", pb);
  cmd_metrics(cfg);

  const std::string csv = read_file(tmp.path / "metrics.csv");
  CHECK(csv.rfind("frame_index,metric,value", 0) == 0);
  // One binned frame, four metrics.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("0,mss,") != std::string::npos);
  CHECK(csv.find("0,esim,") != std::string::npos);
  CHECK(csv.find("0,esim2,") != std::string::npos);
  CHECK(csv.find("0,esim4,") != std::string::npos);

  Config mismatched = cfg;
  CHECK_THROWS_AS(
      [&] {
        Config c;
        c.set("main.seed", "1");
        c.set("main.out_root", tmp.str());
        c.set("metrics.scenario", "unheard-of");
        cmd_metrics(c);
      }(),
      Error);
}

TEST_CASE("frame dumps render one image per bin") {
  TempDir tmp("dump");
  ShiftedBallPair pair = shifted_ball_pair(0.0, 9);
  EventStream s;
  s.geom = pair.reference.geom;
  for (int y = 0; y < s.geom.height; ++y)
    for (int x = 0; x < s.geom.width; ++x)
      if (pair.reference.at(x, y) != 0)
        s.events.push_back({250, x, y, pair.reference.at(x, y)});
  const std::string aer = (tmp.path / "in.aer").string();
  write_aer(s, aer);

  Config cfg;
  cfg.set("main.seed", "1");
  cfg.set("main.out_root", tmp.str());
  cfg.set("dump.input", aer);
  cfg.set("dump.dt", "500");
  cmd_dump_frames(cfg);
  CHECK(fs::exists(tmp.path / "frames" / "frame_00000.pgm"));
  GrayImage img =
      read_pgm((tmp.path / "frames" / "frame_00000.pgm").string());
  CHECK(img.width == 128);
  CHECK(img.height == 128);
}

TEST_CASE("the full pipeline rerun is byte-identical") {
  TempDir tmp_a("rerun_a"), tmp_b("rerun_b");

  auto run_all = [](const std::string& root) {
    Config cfg = tiny_pipeline_config(root);
    cfg.set("metrics.scenario", "shifted-ball");
    cfg.set("metrics.offsets", "0.0,0.25");
    cmd_gen_data(cfg);
    cmd_train(cfg, "predictor");
    cmd_train(cfg, "evaluator");
    cmd_metrics(cfg);
    cmd_run_attention(cfg);
    cmd_compare(cfg);
  };
  run_all(tmp_a.str());
  run_all(tmp_b.str());

  const std::vector<std::string> artifacts = {
      "dataset/manifest.csv", "dataset/seq_0000.aer", "dataset/seq_0005.aer",
      "predictor.ckpt",       "predictor_loss.csv",   "evaluator.ckpt",
      "evaluator_loss.csv",   "shifted_ball.csv",     "attention/trace_seq1.csv",
      "attention/trace_seq3.csv", "compare.csv"};
  for (const std::string& rel : artifacts) {
    INFO("artifact: " << rel);
    REQUIRE(fs::exists(tmp_a.path / rel));
    CHECK(read_file(tmp_a.path / rel) == read_file(tmp_b.path / rel));
  }

  // Loss CSVs carry the exact schema downstream tooling expects.
  const std::string loss = read_file(tmp_a.path / "predictor_loss.csv");
  CHECK(loss.rfind("epoch,train_loss,val_loss", 0) == 0);
  CHECK(std::count(loss.begin(), loss.end(), '\n') == 3);
  const std::string trace = read_file(tmp_a.path / "attention/trace_seq1.csv");
  CHECK(trace.rfind("step,attended,est_score,actual_esim4,link_bits,"
                    "spike_count",
                    0) == 0);
  const std::string compare = read_file(tmp_a.path / "compare.csv");
  CHECK(compare.rfind("policy,theta,seed,attend_rate,awareness_mean,"
                      "awareness_std,link_bits_mean,spikes_mean",
                      0) == 0);
  CHECK(std::count(compare.begin(), compare.end(), '\n') == 4);
}

TEST_CASE("commands route output through the environment root") {
  TempDir tmp("envroot");
  EnvGuard guard("EVATT_OUT_ROOT");
  setenv("EVATT_OUT_ROOT", tmp.str().c_str(), 1);

  Config cfg;  // no main.out_root on purpose
  cfg.set("main.seed", "3");
  cfg.set("metrics.scenario", "shifted-ball");
  cfg.set("metrics.offsets", "0.0");
  cmd_metrics(cfg);
  CHECK(fs::exists(tmp.path / "shifted_ball.csv"));
}
