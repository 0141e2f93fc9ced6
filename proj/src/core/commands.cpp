#include "core/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "core/aer_io.hpp"
#include "core/attention.hpp"
#include "core/io_util.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"

namespace evatt {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string seq_file_name(int id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "seq_%04d.aer", id);
  return buf;
}

std::string join(const std::string& dir, const std::string& leaf) {
  return dir + "/" + leaf;
}

void ensure_parent_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
}

std::vector<int> get_ints(const Config& cfg, const std::string& key,
                          std::vector<int> fallback) {
  if (!cfg.has(key)) return fallback;
  std::vector<int> out;
  for (std::uint64_t v : cfg.get_uints(key)) out.push_back(static_cast<int>(v));
  return out;
}

DatasetConfig dataset_config_from(const Config& cfg) {
  DatasetConfig dc;
  dc.geom.width = static_cast<int>(cfg.get_int_or("dataset.width", 64));
  dc.geom.height = static_cast<int>(cfg.get_int_or("dataset.height", 64));
  dc.sequences = static_cast<int>(cfg.get_int_or("dataset.sequences", 200));
  dc.frames_per_sequence =
      static_cast<int>(cfg.get_int_or("dataset.frames", 24));
  dc.seed = cfg.get_seed("main.seed");
  dc.balls = static_cast<int>(cfg.get_int_or("dataset.balls", 3));
  dc.radius_min = cfg.get_double_or("dataset.radius_min", dc.radius_min);
  dc.radius_max = cfg.get_double_or("dataset.radius_max", dc.radius_max);
  dc.speed_min = cfg.get_double_or("dataset.speed_min", dc.speed_min);
  dc.speed_max = cfg.get_double_or("dataset.speed_max", dc.speed_max);
  dc.bg_intensity = cfg.get_double_or("dataset.bg_intensity", dc.bg_intensity);
  dc.obj_intensity =
      cfg.get_double_or("dataset.obj_intensity", dc.obj_intensity);
  dc.th_log = cfg.get_double_or("dataset.th_log", dc.th_log);
  dc.dt = cfg.get_int_or("dataset.dt", dc.dt);
  dc.sprite_path = cfg.get_or("dataset.sprite_path", "");
  dc.sprite_count =
      static_cast<int>(cfg.get_int_or("dataset.sprite_count", dc.sprite_count));
  return dc;
}

std::string dataset_dir(const Config& cfg) {
  return join(resolve_out_root(cfg), cfg.get_or("dataset.dir", "dataset"));
}

LifParams lif_from(const Config& cfg, const std::string& section) {
  LifParams lif;
  lif.tau = cfg.get_double_or(section + ".tau", lif.tau);
  lif.v_th = cfg.get_double_or(section + ".v_th", lif.v_th);
  lif.alpha = cfg.get_double_or(section + ".alpha", lif.alpha);
  return lif;
}

PredictorModel load_predictor(const Config& cfg, const std::string& key) {
  const std::string path =
      cfg.get_or(key, join(resolve_out_root(cfg), "predictor.ckpt"));
  if (!std::filesystem::exists(path))
    fail(ErrorKind::Config,
         "predictor checkpoint not found at " + path +
             "; run 'train predictor' first or set " + key);
  return predictor_from_checkpoint(load_checkpoint(path));
}

EvaluatorModel load_evaluator(const Config& cfg, const std::string& key) {
  const std::string path =
      cfg.get_or(key, join(resolve_out_root(cfg), "evaluator.ckpt"));
  if (!std::filesystem::exists(path))
    fail(ErrorKind::Config,
         "evaluator checkpoint not found at " + path +
             "; run 'train evaluator' first or set " + key);
  return evaluator_from_checkpoint(load_checkpoint(path));
}

std::vector<const SequenceRecord*> take_split(const Dataset& ds, bool train,
                                              int count) {
  std::vector<const SequenceRecord*> seqs = ds.split(train);
  if (count > 0 && static_cast<std::size_t>(count) < seqs.size())
    seqs.resize(static_cast<std::size_t>(count));
  return seqs;
}

void write_loss_csv(const std::string& path,
                    const std::vector<EpochStats>& curve) {
  ensure_parent_dir(path);
  AtomicFile out(path);
  out.stream() << "epoch,train_loss,val_loss\n";
  for (const EpochStats& s : curve)
    out.stream() << s.epoch << "," << fmt(s.train_loss) << ","
                 << fmt(s.val_loss) << "\n";
  out.commit();
}

GatePolicy policy_from(const Config& cfg, std::uint64_t seed) {
  const std::string kind = cfg.get_or("attention.policy", "predictive");
  if (kind == "predictive")
    return GatePolicy::predictive(cfg.get_double_or("attention.theta", 0.5));
  if (kind == "random")
    return GatePolicy::random(
        cfg.get_double_or("attention.rate", 0.5),
        cfg.has("attention.policy_seed")
            ? cfg.get_seed("attention.policy_seed")
            : mix_seed(seed, 31));
  if (kind == "periodic")
    return GatePolicy::periodic(
        static_cast<int>(cfg.get_int_or("attention.period", 2)),
        static_cast<int>(cfg.get_int_or("attention.phase", 0)));
  fail(ErrorKind::Config, "unknown attention.policy '" + kind +
                              "' (predictive, random or periodic)");
}

LinkEnergyModel link_from(const Config& cfg) {
  LinkEnergyModel link;
  link.bits_per_event =
      static_cast<int>(cfg.get_int_or("attention.bits_per_event", 24));
  link.energy_per_bit =
      cfg.get_double_or("attention.energy_per_bit", link.energy_per_bit);
  if (link.bits_per_event <= 0)
    fail(ErrorKind::Config, "attention.bits_per_event must be positive");
  const bool unchecked =
      cfg.get_bool_or("attention.energy_per_bit_unchecked", false);
  if (!unchecked && (link.energy_per_bit < kEnergyPerBitMin ||
                     link.energy_per_bit > kEnergyPerBitMax))
    fail(ErrorKind::Config,
         "attention.energy_per_bit " + fmt(link.energy_per_bit) +
             " outside the plausible link range [" + fmt(kEnergyPerBitMin) +
             ", " + fmt(kEnergyPerBitMax) +
             "]; set attention.energy_per_bit_unchecked=1 to override");
  return link;
}

// Sensor stream the loop sees: the recorded frames, optionally corrupted by
// spurious events. The clean stream stays the scoring reference.
FrameSequence noisy_copy(const FrameSequence& clean, double level,
                         std::uint64_t seed, int id) {
  FrameSequence noisy = clean;
  for (int t = 0; t < clean.count(); ++t) {
    const std::uint64_t stream =
        (static_cast<std::uint64_t>(id + 1) << 20) +
        static_cast<std::uint64_t>(t);
    noisy.frames[t] = inject_noise(clean.frames[t], level,
                                   mix_seed(seed, stream))
                          .frame;
    noisy.frames[t].frame_index = clean.frames[t].frame_index;
  }
  return noisy;
}

}  // namespace

std::string resolve_out_root(const Config& cfg) {
  const std::string configured = cfg.get_or("main.out_root", "");
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("EVATT_OUT_ROOT"); env && *env)
    return env;
  return "out";
}

void cmd_gen_data(const Config& cfg) {
  const DatasetConfig dc = dataset_config_from(cfg);
  const Dataset ds = generate_dataset(dc);
  const std::string dir = dataset_dir(cfg);
  ensure_dir(dir);

  for (const SequenceRecord& rec : ds.sequences)
    write_aer(rec.events, join(dir, seq_file_name(rec.id)));

  AtomicFile manifest(join(dir, "manifest.csv"));
  manifest.stream() << "id,file,split,seed\n";
  for (const SequenceRecord& rec : ds.sequences)
    manifest.stream() << rec.id << "," << seq_file_name(rec.id) << ","
                      << (rec.train ? "train" : "test") << "," << rec.seed
                      << "\n";
  manifest.commit();

  std::cout << "wrote " << ds.sequences.size() << " sequences ("
            << dc.geom.width << "x" << dc.geom.height << ", "
            << dc.frames_per_sequence << " frames) to " << dir << "\n";
}

Dataset load_dataset(const Config& cfg) {
  const DatasetConfig dc = dataset_config_from(cfg);
  const std::string dir = dataset_dir(cfg);
  const std::string manifest_path = join(dir, "manifest.csv");
  std::ifstream in(manifest_path);
  if (!in)
    fail(ErrorKind::Config, "dataset manifest not found at " + manifest_path +
                                "; run gen-data first");

  Dataset ds;
  ds.config = dc;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1) {
      if (line != "id,file,split,seed")
        fail(ErrorKind::Parse,
             manifest_path + ": unexpected manifest header '" + line + "'");
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i)
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    if (fields.size() != 4)
      fail(ErrorKind::Parse, manifest_path + ":" + std::to_string(line_no) +
                                 ": expected 4 fields");
    SequenceRecord rec;
    try {
      rec.id = std::stoi(fields[0]);
      rec.seed = std::stoull(fields[3]);
    } catch (const std::exception&) {
      fail(ErrorKind::Parse, manifest_path + ":" + std::to_string(line_no) +
                                 ": bad id or seed");
    }
    if (fields[2] != "train" && fields[2] != "test")
      fail(ErrorKind::Parse, manifest_path + ":" + std::to_string(line_no) +
                                 ": split must be train or test");
    rec.train = fields[2] == "train";
    rec.events = read_aer(join(dir, fields[1]));
    if (!(rec.events.geom == dc.geom))
      fail(ErrorKind::Dimension,
           fields[1] + ": geometry does not match the configured dataset");
    rec.frames = bin_events(rec.events, 0, dc.dt, dc.frames_per_sequence);
    ds.sequences.push_back(std::move(rec));
  }
  if (ds.sequences.empty())
    fail(ErrorKind::Config, manifest_path + " lists no sequences");
  return ds;
}

namespace {

void train_predictor_cmd(const Config& cfg) {
  const Dataset ds = load_dataset(cfg);
  const std::uint64_t seed = cfg.get_seed("main.seed");
  const std::string out_root = resolve_out_root(cfg);

  PredictorArch arch;
  arch.geom = ds.config.geom;
  arch.encoder_channels = get_ints(cfg, "predictor.encoder", {16, 32, 64});
  arch.residual_blocks =
      static_cast<int>(cfg.get_int_or("predictor.residual_blocks", 2));
  arch.decoder_channels = get_ints(cfg, "predictor.decoder", {32, 16});
  arch.lif = lif_from(cfg, "predictor");

  PredictorTrainConfig tc;
  tc.epochs = static_cast<int>(cfg.get_int_or("predictor.epochs", tc.epochs));
  tc.batch = static_cast<int>(cfg.get_int_or("predictor.batch", tc.batch));
  tc.window = static_cast<int>(cfg.get_int_or("predictor.window", tc.window));
  tc.lr = cfg.get_double_or("predictor.lr", tc.lr);
  tc.seed = seed;
  tc.noise_aug_prob =
      cfg.get_double_or("predictor.noise_aug_prob", tc.noise_aug_prob);
  tc.noise_aug_max =
      cfg.get_double_or("predictor.noise_aug_max", tc.noise_aug_max);
  tc.val_sequences = static_cast<int>(
      cfg.get_int_or("predictor.val_sequences", tc.val_sequences));

  PredictorModel model = make_predictor(arch, mix_seed(seed, 11));
  const std::vector<EpochStats> curve =
      train_predictor(model, ds, tc, &std::cout);

  const std::string ckpt_path =
      cfg.get_or("predictor.checkpoint", join(out_root, "predictor.ckpt"));
  ensure_parent_dir(ckpt_path);
  save_checkpoint(predictor_checkpoint(model), ckpt_path);
  write_loss_csv(
      cfg.get_or("predictor.loss_csv", join(out_root, "predictor_loss.csv")),
      curve);

  // Report validation loss from the stored weights so the number printed is
  // the one any later load reproduces.
  PredictorModel reloaded = predictor_from_checkpoint(load_checkpoint(ckpt_path));
  const double reloaded_val = predictor_validation_loss(reloaded, ds, tc);
  std::cout << "checkpoint " << ckpt_path << "\n"
            << "final_train_loss " << fmt(curve.back().train_loss) << "\n"
            << "final_val_loss " << fmt(reloaded_val) << "\n";
}

void train_evaluator_cmd(const Config& cfg) {
  const Dataset ds = load_dataset(cfg);
  const std::uint64_t seed = cfg.get_seed("main.seed");
  const std::string out_root = resolve_out_root(cfg);

  PredictorModel predictor =
      load_predictor(cfg, "evaluator.predictor_checkpoint");
  if (!(predictor.arch.geom == ds.config.geom))
    fail(ErrorKind::Dimension,
         "predictor checkpoint geometry does not match the dataset");

  std::vector<int> anchors =
      get_ints(cfg, "evaluator.anchors", {3, 7, 11, 14});
  const int max_horizon =
      static_cast<int>(cfg.get_int_or("evaluator.max_horizon", 10));
  EvalCorpus train_corpus =
      build_rollout_corpus(predictor, ds, true, anchors, max_horizon);
  EvalCorpus val_corpus =
      build_rollout_corpus(predictor, ds, false, anchors, max_horizon);

  EvaluatorArch arch;
  arch.geom = ds.config.geom;
  arch.channels = get_ints(cfg, "evaluator.channels", {8, 16, 32});
  arch.kernel = static_cast<int>(cfg.get_int_or("evaluator.kernel", 3));
  arch.steps = static_cast<int>(cfg.get_int_or("evaluator.steps", 10));
  arch.lif = lif_from(cfg, "evaluator");

  EvaluatorTrainConfig tc;
  tc.epochs = static_cast<int>(cfg.get_int_or("evaluator.epochs", tc.epochs));
  tc.batch = static_cast<int>(cfg.get_int_or("evaluator.batch", tc.batch));
  tc.lr = cfg.get_double_or("evaluator.lr", tc.lr);
  tc.seed = seed;

  EvaluatorModel model = make_evaluator(arch, mix_seed(seed, 21));
  const std::vector<EpochStats> curve =
      train_evaluator(model, train_corpus, &val_corpus, tc, &std::cout);

  const std::string ckpt_path =
      cfg.get_or("evaluator.checkpoint", join(out_root, "evaluator.ckpt"));
  ensure_parent_dir(ckpt_path);
  save_checkpoint(evaluator_checkpoint(model), ckpt_path);
  write_loss_csv(
      cfg.get_or("evaluator.loss_csv", join(out_root, "evaluator_loss.csv")),
      curve);

  EvaluatorModel reloaded =
      evaluator_from_checkpoint(load_checkpoint(ckpt_path));
  const double reloaded_val = evaluator_corpus_mse(reloaded, val_corpus);
  std::cout << "checkpoint " << ckpt_path << "\n"
            << "final_train_loss " << fmt(curve.back().train_loss) << "\n"
            << "final_val_loss " << fmt(reloaded_val) << "\n";
}

}  // namespace

void cmd_train(const Config& cfg, const std::string& target) {
  if (target == "predictor")
    train_predictor_cmd(cfg);
  else if (target == "evaluator")
    train_evaluator_cmd(cfg);
  else
    fail(ErrorKind::Config,
         "unknown train target '" + target + "' (predictor or evaluator)");
}

void cmd_metrics(const Config& cfg) {
  const std::string scenario = cfg.get_or("metrics.scenario", "");
  const std::string out_root = resolve_out_root(cfg);

  if (scenario == "shifted-ball") {
    const std::uint64_t seed = cfg.get_seed("main.seed");
    std::vector<double> offsets{0.0, 0.05, 0.10, 0.25};
    if (cfg.has("metrics.offsets")) offsets = cfg.get_doubles("metrics.offsets");
    const std::string out_path =
        cfg.get_or("metrics.out", join(out_root, "shifted_ball.csv"));
    ensure_parent_dir(out_path);
    AtomicFile out(out_path);
    out.stream() << "frame_index,metric,value\n";
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      const ShiftedBallPair pair = shifted_ball_pair(
          offsets[i], mix_seed(seed, static_cast<std::uint64_t>(i)));
      const double v_mss = mss(pair.reference, pair.shifted).value;
      const double v_esim = esim(pair.reference, pair.shifted).value;
      const double v_e2 = region_esim(pair.reference, pair.shifted, 2).value;
      const double v_e4 = region_esim(pair.reference, pair.shifted, 4).value;
      out.stream() << i << ",offset_fraction," << fmt(offsets[i]) << "\n"
                   << i << ",mss," << fmt(v_mss) << "\n"
                   << i << ",esim," << fmt(v_esim) << "\n"
                   << i << ",esim2," << fmt(v_e2) << "\n"
                   << i << ",esim4," << fmt(v_e4) << "\n";
      std::cout << "offset " << fmt(offsets[i]) << " mss " << fmt(v_mss)
                << " esim " << fmt(v_esim) << " esim2 " << fmt(v_e2)
                << " esim4 " << fmt(v_e4) << "\n";
    }
    out.commit();
    std::cout << "wrote " << out_path << "\n";
    return;
  }
  if (!scenario.empty())
    fail(ErrorKind::Config,
         "unknown metrics.scenario '" + scenario + "' (shifted-ball)");

  const EventStream ea = read_aer(cfg.get("metrics.a"));
  const EventStream eb = read_aer(cfg.get("metrics.b"));
  if (!(ea.geom == eb.geom))
    fail(ErrorKind::Dimension, "metrics.a and metrics.b geometries differ");
  const std::int64_t dt = cfg.get_int_or("metrics.dt", 1000);
  FrameSequence fa = bin_events(ea, 0, dt, 0);
  FrameSequence fb = bin_events(eb, 0, dt, 0);
  const int count = std::max(fa.count(), fb.count());
  if (count == 0) fail(ErrorKind::Range, "both event streams are empty");
  if (fa.count() != count) fa = bin_events(ea, 0, dt, count);
  if (fb.count() != count) fb = bin_events(eb, 0, dt, count);

  const std::string out_path =
      cfg.get_or("metrics.out", join(out_root, "metrics.csv"));
  ensure_parent_dir(out_path);
  AtomicFile out(out_path);
  out.stream() << "frame_index,metric,value\n";
  for (int i = 0; i < count; ++i) {
    const EventFrame& a = fa.frames[i];
    const EventFrame& b = fb.frames[i];
    out.stream() << i << ",mss," << fmt(mss(a, b).value) << "\n"
                 << i << ",esim," << fmt(esim(a, b).value) << "\n"
                 << i << ",esim2," << fmt(region_esim(a, b, 2).value) << "\n"
                 << i << ",esim4," << fmt(region_esim(a, b, 4).value) << "\n";
  }
  out.commit();
  std::cout << "wrote " << count << " frames of metrics to " << out_path
            << "\n";
}

void cmd_run_attention(const Config& cfg) {
  const Dataset ds = load_dataset(cfg);
  const std::uint64_t seed = cfg.get_seed("main.seed");
  const std::string out_root = resolve_out_root(cfg);

  PredictorModel predictor =
      load_predictor(cfg, "attention.predictor_checkpoint");
  const GatePolicy policy = policy_from(cfg, seed);

  EvaluatorModel evaluator;
  EvaluatorModel* evaluator_ptr = nullptr;
  if (policy.kind == GatePolicy::Kind::predictive ||
      cfg.has("attention.evaluator_checkpoint")) {
    evaluator = load_evaluator(cfg, "attention.evaluator_checkpoint");
    evaluator_ptr = &evaluator;
  }

  const int warmup = static_cast<int>(cfg.get_int_or("attention.warmup", 3));
  const int count =
      static_cast<int>(cfg.get_int_or("attention.sequences", 3));
  const double noise = cfg.get_double_or("attention.noise_level", 0.0);
  const bool dump = cfg.get_bool_or("attention.dump_frames", false);
  const LinkEnergyModel link = link_from(cfg);

  const std::string dir =
      join(out_root, cfg.get_or("attention.dir", "attention"));
  ensure_dir(dir);

  std::vector<const SequenceRecord*> seqs = take_split(ds, false, count);
  if (seqs.empty()) seqs = take_split(ds, true, count);
  if (seqs.empty()) fail(ErrorKind::Config, "dataset has no sequences");

  double rate_sum = 0.0, aware_sum = 0.0, energy_sum = 0.0;
  std::int64_t bits_sum = 0, spikes_sum = 0;
  for (const SequenceRecord* rec : seqs) {
    FrameSequence sensor = rec->frames;
    const FrameSequence* truth = nullptr;
    if (noise > 0.0) {
      sensor = noisy_copy(rec->frames, noise, seed, rec->id);
      truth = &rec->frames;
    }
    const AttentionTrace trace = run_closed_loop(
        sensor, truth, predictor, evaluator_ptr, policy, warmup, dump, link);

    const std::string csv_path =
        join(dir, "trace_seq" + std::to_string(rec->id) + ".csv");
    AtomicFile out(csv_path);
    out.stream() << "step,attended,est_score,actual_esim4,link_bits,"
                    "spike_count\n";
    for (const StepTrace& s : trace.steps) {
      out.stream() << s.step << "," << (s.attended ? 1 : 0) << ",";
      if (s.has_estimate) out.stream() << fmt(s.estimated_score);
      out.stream() << "," << fmt(s.actual_esim4) << "," << s.link_bits << ","
                   << s.encoder_spike_count << "\n";
    }
    out.commit();

    if (dump) {
      const std::string frame_dir =
          join(dir, "seq" + std::to_string(rec->id));
      ensure_dir(frame_dir);
      FrameSequence aware{sensor.geom, sensor.dt, sensor.t_start,
                          trace.awareness_frames};
      FrameSequence pred{sensor.geom, sensor.dt, sensor.t_start,
                         trace.predicted_frames};
      dump_frames_pgm(aware, frame_dir, "aware_");
      dump_frames_pgm(pred, frame_dir, "pred_");
    }

    const double energy = trace.link_energy(link);
    std::cout << "seq " << rec->id << " policy " << policy.name()
              << " attend_rate " << fmt(trace.attend_rate()) << " gating_rate "
              << fmt(trace.gating_rate()) << " awareness "
              << fmt(trace.awareness()) << " link_bits " << trace.link_bits()
              << " energy_J " << fmt(energy) << " spikes "
              << trace.total_spikes() << "\n";
    rate_sum += trace.attend_rate();
    aware_sum += trace.awareness();
    energy_sum += energy;
    bits_sum += trace.link_bits();
    spikes_sum += trace.total_spikes();
  }
  const double n = static_cast<double>(seqs.size());
  std::cout << "mean attend_rate " << fmt(rate_sum / n) << " awareness "
            << fmt(aware_sum / n) << " link_bits "
            << fmt(static_cast<double>(bits_sum) / n) << " energy_J "
            << fmt(energy_sum / n) << " spikes "
            << fmt(static_cast<double>(spikes_sum) / n) << "\n";
}

void cmd_compare(const Config& cfg) {
  const Dataset ds = load_dataset(cfg);
  const std::string out_root = resolve_out_root(cfg);

  PredictorModel predictor =
      load_predictor(cfg, "compare.predictor_checkpoint");
  EvaluatorModel evaluator =
      load_evaluator(cfg, "compare.evaluator_checkpoint");

  std::vector<double> thresholds{0.3, 0.5, 0.7};
  if (cfg.has("compare.thresholds"))
    thresholds = cfg.get_doubles("compare.thresholds");
  std::vector<std::uint64_t> seeds{1, 2, 3};
  if (cfg.has("compare.seeds")) seeds = cfg.get_uints("compare.seeds");
  const int warmup = static_cast<int>(cfg.get_int_or("compare.warmup", 3));
  const int count = static_cast<int>(cfg.get_int_or("compare.sequences", 10));

  std::vector<const SequenceRecord*> seqs = take_split(ds, false, count);
  if (seqs.empty()) seqs = take_split(ds, true, count);
  if (seqs.empty()) fail(ErrorKind::Config, "dataset has no sequences");

  const std::vector<PolicyRow> rows =
      compare_policies(seqs, predictor, evaluator, thresholds, seeds, warmup);

  const std::string out_path =
      cfg.get_or("compare.out", join(out_root, "compare.csv"));
  ensure_parent_dir(out_path);
  AtomicFile out(out_path);
  out.stream() << "policy,theta,seed,attend_rate,awareness_mean,"
                  "awareness_std,link_bits_mean,spikes_mean\n";
  for (const PolicyRow& r : rows)
    out.stream() << r.policy << "," << fmt(r.theta) << "," << r.seed << ","
                 << fmt(r.attend_rate) << "," << fmt(r.awareness_mean) << ","
                 << fmt(r.awareness_std) << "," << fmt(r.link_bits_mean) << ","
                 << fmt(r.spikes_mean) << "\n";
  out.commit();

  for (const PolicyRow& r : rows)
    std::cout << r.policy << " theta " << fmt(r.theta) << " seed " << r.seed
              << " attend_rate " << fmt(r.attend_rate) << " awareness "
              << fmt(r.awareness_mean) << " +/- " << fmt(r.awareness_std)
              << " link_bits " << fmt(r.link_bits_mean) << " spikes "
              << fmt(r.spikes_mean) << "\n";
  std::cout << "wrote " << out_path << "\n";
}

void cmd_dump_frames(const Config& cfg) {
  const std::string input = cfg.get("dump.input");
  const EventStream stream = read_aer(input);
  const std::int64_t dt = cfg.get_int_or("dump.dt", 1000);
  const int horizon = static_cast<int>(cfg.get_int_or("dump.frames", 0));
  const FrameSequence seq = bin_events(stream, 0, dt, horizon);
  if (seq.count() == 0) fail(ErrorKind::Range, input + " yields no frames");

  const std::string dir =
      cfg.get_or("dump.dir", join(resolve_out_root(cfg), "frames"));
  ensure_dir(dir);
  dump_frames_pgm(seq, dir, cfg.get_or("dump.prefix", "frame_"));
  std::cout << "wrote " << seq.count() << " frames to " << dir << "\n";
}

}  // namespace evatt
