#include "core/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"

namespace evatt {

namespace {

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) fail(ErrorKind::Parse, "empty entry in list '" + s + "'");
    out.push_back(std::stoi(item));
  }
  return out;
}

std::string meta_get(
    const std::vector<std::pair<std::string, std::string>>& meta,
    const std::string& key) {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  fail(ErrorKind::Config, "model spec missing key '" + key + "'");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> PredictorArch::to_meta()
    const {
  return {
      {"width", std::to_string(geom.width)},
      {"height", std::to_string(geom.height)},
      {"encoder", join_ints(encoder_channels)},
      {"residual_blocks", std::to_string(residual_blocks)},
      {"decoder", join_ints(decoder_channels)},
      {"enc_kernel", std::to_string(enc_kernel)},
      {"dec_kernel", std::to_string(dec_kernel)},
      {"tau", std::to_string(lif.tau)},
      {"v_th", std::to_string(lif.v_th)},
      {"alpha", std::to_string(lif.alpha)},
  };
}

PredictorArch PredictorArch::from_meta(
    const std::vector<std::pair<std::string, std::string>>& meta) {
  PredictorArch a;
  a.geom = {std::stoi(meta_get(meta, "width")),
            std::stoi(meta_get(meta, "height"))};
  a.encoder_channels = split_ints(meta_get(meta, "encoder"));
  a.residual_blocks = std::stoi(meta_get(meta, "residual_blocks"));
  a.decoder_channels = split_ints(meta_get(meta, "decoder"));
  a.enc_kernel = std::stoi(meta_get(meta, "enc_kernel"));
  a.dec_kernel = std::stoi(meta_get(meta, "dec_kernel"));
  a.lif.tau = std::stod(meta_get(meta, "tau"));
  a.lif.v_th = std::stod(meta_get(meta, "v_th"));
  a.lif.alpha = std::stod(meta_get(meta, "alpha"));
  if (a.encoder_channels.empty())
    fail(ErrorKind::Config, "model spec has empty encoder stack");
  if (static_cast<int>(a.decoder_channels.size()) != a.depth() - 1)
    fail(ErrorKind::Config,
         "decoder must list depth-1 channel counts (final layer emits 3)");
  if (a.dec_kernel % 2 != 0)
    fail(ErrorKind::Config, "decoder kernel must be even to double extents");
  return a;
}

std::vector<Parameter*> PredictorModel::parameters() {
  std::vector<Parameter*> out;
  auto push = [&out](std::vector<ConvLayer>& layers) {
    for (auto& l : layers) {
      out.push_back(&l.w);
      out.push_back(&l.b);
    }
  };
  push(encoder);
  push(residual);
  push(decoder);
  push(skips);
  return out;
}

PredictorModel make_predictor(const PredictorArch& arch, std::uint64_t seed) {
  if (static_cast<int>(arch.decoder_channels.size()) != arch.depth() - 1)
    fail(ErrorKind::Config,
         "decoder must list depth-1 channel counts (final layer emits 3)");
  PredictorModel m;
  m.arch = arch;
  const int depth = arch.depth();
  const int k = arch.enc_kernel;

  int prev = 2;
  for (int i = 0; i < depth; ++i) {
    const int ch = arch.encoder_channels[i];
    m.encoder.push_back(
        {Parameter("enc" + std::to_string(i) + ".w", Tensor({ch, prev, k, k})),
         Parameter("enc" + std::to_string(i) + ".b", Tensor({ch}))});
    prev = ch;
  }
  const int bottleneck = arch.encoder_channels.back();
  for (int r = 0; r < arch.residual_blocks; ++r)
    m.residual.push_back(
        {Parameter("res" + std::to_string(r) + ".w",
                   Tensor({bottleneck, bottleneck, 3, 3})),
         Parameter("res" + std::to_string(r) + ".b", Tensor({bottleneck}))});

  std::vector<int> dec_out = arch.decoder_channels;
  dec_out.push_back(3);
  prev = bottleneck;
  const int dk = arch.dec_kernel;
  for (int j = 0; j < depth; ++j) {
    m.decoder.push_back(
        {Parameter("dec" + std::to_string(j) + ".w",
                   Tensor({prev, dec_out[j], dk, dk})),
         Parameter("dec" + std::to_string(j) + ".b", Tensor({dec_out[j]}))});
    prev = dec_out[j];
  }
  for (int j = 0; j + 1 < depth; ++j) {
    const int src_ch = arch.encoder_channels[depth - 2 - j];
    m.skips.push_back(
        {Parameter("skip" + std::to_string(j) + ".w",
                   Tensor({dec_out[j], src_ch, 1, 1})),
         Parameter("skip" + std::to_string(j) + ".b", Tensor({dec_out[j]}))});
  }

  // The final deconv stays zero so a fresh model emits uniform probabilities.
  int idx = 0;
  for (Parameter* p : m.parameters()) {
    if (p->name == "dec" + std::to_string(depth - 1) + ".w" ||
        p->name == "dec" + std::to_string(depth - 1) + ".b") {
      ++idx;
      continue;
    }
    if (p->value.ndim() > 1) init_kaiming_uniform(*p, mix_seed(seed, idx));
    ++idx;
  }
  return m;
}

Checkpoint predictor_checkpoint(PredictorModel& model) {
  Checkpoint c;
  c.kind = "predictor";
  c.meta = model.arch.to_meta();
  for (Parameter* p : model.parameters()) c.tensors.emplace_back(p->name, p->value);
  return c;
}

PredictorModel predictor_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != "predictor")
    fail(ErrorKind::Config, "checkpoint kind '" + ckpt.kind +
                                "' is not a predictor");
  PredictorModel m = make_predictor(PredictorArch::from_meta(ckpt.meta), 0);
  for (Parameter* p : m.parameters()) {
    const Tensor& t = ckpt.tensor(p->name);
    if (t.shape != p->value.shape)
      fail(ErrorKind::Config, "checkpoint tensor '" + p->name +
                                  "' has shape " + shape_string(t) +
                                  ", expected " + shape_string(p->value));
    p->value = t;
    p->grad.zero();
  }
  return m;
}

PredictorState initial_state(const PredictorModel& model, int batch) {
  if (batch <= 0) fail(ErrorKind::Range, "batch must be positive");
  PredictorState st;
  int h = model.arch.geom.height, w = model.arch.geom.width;
  const int k = model.arch.enc_kernel;
  for (int i = 0; i < model.arch.depth(); ++i) {
    h = conv_out_extent(h, k, 2, k / 2);
    w = conv_out_extent(w, k, 2, k / 2);
    st.u.emplace_back(
        std::vector<int>{batch, model.arch.encoder_channels[i], h, w});
    st.y.emplace_back(
        std::vector<int>{batch, model.arch.encoder_channels[i], h, w});
  }
  return st;
}

VarId predictor_step(Tape& tape, PredictorModel& model, VarId planes,
                     PredictorStepVars& state, SnnMode mode) {
  const PredictorArch& arch = model.arch;
  const int depth = arch.depth();
  const int k = arch.enc_kernel;
  std::vector<VarId> spikes(depth);

  VarId x = planes;
  for (int i = 0; i < depth; ++i) {
    VarId cur = tape.conv2d(x, model.encoder[i].w, &model.encoder[i].b, 2,
                            k / 2);
    VarId u = tape.lif_update(cur, state.u[i], state.y[i], arch.lif.tau, mode);
    VarId y = tape.spike(u, arch.lif.v_th, arch.lif.alpha, mode,
                         "enc" + std::to_string(i));
    state.u[i] = u;
    state.y[i] = y;
    spikes[i] = y;
    x = y;
  }
  for (auto& block : model.residual) {
    VarId c = tape.conv2d(x, block.w, &block.b, 1, 1);
    x = tape.relu(tape.add(x, c));
  }
  const int dk = arch.dec_kernel;
  const int dpad = (dk - 2) / 2;
  for (int j = 0; j < depth; ++j) {
    x = tape.deconv2d(x, model.decoder[j].w, &model.decoder[j].b, 2, dpad);
    if (j + 1 < depth) {
      VarId proj = tape.conv2d(spikes[depth - 2 - j], model.skips[j].w,
                               &model.skips[j].b, 1, 0);
      x = tape.relu(tape.add(x, proj));
    }
  }
  return tape.softmax_channels(x);
}

Tensor planes_from_frames(const std::vector<const EventFrame*>& frames) {
  if (frames.empty()) fail(ErrorKind::Range, "no frames given");
  const Geometry g = frames[0]->geom;
  const int n = static_cast<int>(frames.size());
  Tensor t({n, 2, g.height, g.width});
  const std::int64_t plane = g.cells();
  for (int s = 0; s < n; ++s) {
    if (!(frames[s]->geom == g))
      fail(ErrorKind::Dimension, "mixed geometries in one batch");
    double* pos = t.ptr() + static_cast<std::int64_t>(s) * 2 * plane;
    double* neg = pos + plane;
    const auto& cells = frames[s]->cells;
    for (std::int64_t i = 0; i < plane; ++i) {
      pos[i] = cells[i] > 0 ? 1.0 : 0.0;
      neg[i] = cells[i] < 0 ? 1.0 : 0.0;
    }
  }
  return t;
}

Tensor planes_from_frame(const EventFrame& frame) {
  return planes_from_frames({&frame});
}

std::vector<std::uint8_t> classes_from_frames(
    const std::vector<const EventFrame*>& frames) {
  if (frames.empty()) fail(ErrorKind::Range, "no frames given");
  const std::int64_t plane = frames[0]->geom.cells();
  std::vector<std::uint8_t> out(frames.size() * plane);
  for (std::size_t s = 0; s < frames.size(); ++s)
    for (std::int64_t i = 0; i < plane; ++i)
      out[s * plane + i] =
          static_cast<std::uint8_t>(class_of_value(frames[s]->cells[i]));
  return out;
}

namespace {

PredictorStepVars state_vars(Tape& tape, const PredictorState& st) {
  PredictorStepVars vars;
  for (const auto& t : st.u) vars.u.push_back(tape.input(t));
  for (const auto& t : st.y) vars.y.push_back(tape.input(t));
  return vars;
}

ProbFrame prob_frame_from(const Tensor& probs, int sample, Geometry g) {
  ProbFrame out(g);
  const std::int64_t plane = g.cells();
  const double* src = probs.ptr() + static_cast<std::int64_t>(sample) * 3 *
                                        plane;
  std::copy(src, src + 3 * plane, out.p.begin());
  return out;
}

}  // namespace

std::pair<PredictorState, ProbFrame> predict_next(PredictorModel& model,
                                                  const PredictorState& state,
                                                  const EventFrame& input,
                                                  SpikeRecorder* recorder) {
  if (!(input.geom == model.arch.geom))
    fail(ErrorKind::Dimension, "input frame does not match model geometry");
  Tape tape;
  tape.set_spike_recorder(recorder);
  PredictorStepVars vars = state_vars(tape, state);
  VarId planes = tape.input(planes_from_frame(input));
  VarId probs = predictor_step(tape, model, planes, vars, SnnMode::spiking);

  PredictorState next;
  for (std::size_t i = 0; i < vars.u.size(); ++i) {
    next.u.push_back(tape.value(vars.u[i]));
    next.y.push_back(tape.value(vars.y[i]));
  }
  return {std::move(next),
          prob_frame_from(tape.value(probs), 0, model.arch.geom)};
}

EventFrame sample_events(const ProbFrame& prob, SampleMode mode,
                         std::uint64_t seed) {
  EventFrame out(prob.geom);
  const std::int64_t plane = prob.geom.cells();
  if (mode == SampleMode::argmax) {
    for (std::int64_t i = 0; i < plane; ++i) {
      int best = 0;
      if (prob.p[plane + i] > prob.p[best * plane + i]) best = 1;
      if (prob.p[2 * plane + i] > prob.p[best * plane + i]) best = 2;
      out.cells[i] = static_cast<std::int8_t>(value_of_class(best));
    }
    return out;
  }
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (std::int64_t i = 0; i < plane; ++i) {
    const double u = dist(rng);
    int cls = 2;
    if (u < prob.p[i])
      cls = 0;
    else if (u < prob.p[i] + prob.p[plane + i])
      cls = 1;
    out.cells[i] = static_cast<std::int8_t>(value_of_class(cls));
  }
  return out;
}

double ce_loss(const ProbFrame& prob, const EventFrame& target) {
  if (!(prob.geom == target.geom))
    fail(ErrorKind::Dimension, "ce_loss geometry mismatch");
  const std::int64_t plane = prob.geom.cells();
  double loss = 0.0;
  for (std::int64_t i = 0; i < plane; ++i) {
    const int cls = class_of_value(target.cells[i]);
    loss -= std::log(std::max(prob.p[cls * plane + i], 1e-12));
  }
  return loss / static_cast<double>(plane);
}

EventFrame persistence_baseline(const EventFrame& input) { return input; }

RolloutResult rollout(PredictorModel& model, const FrameSequence& seq,
                      int seed_count, int horizon, Feedback feedback,
                      SpikeRecorder* recorder) {
  if (seed_count < 1) fail(ErrorKind::Range, "rollout needs >= 1 seed frame");
  if (horizon < 1) fail(ErrorKind::Range, "rollout horizon must be >= 1");
  const int needed = feedback == Feedback::sensed
                         ? seed_count + horizon - 1
                         : seed_count;
  if (seq.count() < needed)
    fail(ErrorKind::Range, "sequence too short for requested rollout");

  RolloutResult result;
  result.predictions.geom = seq.geom;
  result.predictions.dt = seq.dt;
  result.predictions.t_start = seq.t_start;

  PredictorState state = initial_state(model, 1);
  auto feed = [&](const EventFrame& f) {
    auto [next, prob] = predict_next(model, state, f, recorder);
    state = std::move(next);
    return prob;
  };

  ProbFrame prob;
  for (int t = 0; t < seed_count; ++t) {
    result.frames_read.push_back(t);
    prob = feed(seq.frames[t]);
  }
  for (int i = 0; i < horizon; ++i) {
    if (i > 0) {
      if (feedback == Feedback::sensed) {
        const int idx = seed_count + i - 1;
        result.frames_read.push_back(idx);
        prob = feed(seq.frames[idx]);
      } else {
        prob = feed(result.predictions.frames.back());
      }
    }
    EventFrame pred = sample_events(prob, SampleMode::argmax);
    pred.frame_index = seed_count + i;
    result.predictions.frames.push_back(std::move(pred));
    result.probs.push_back(prob);
  }
  return result;
}

namespace {

// One spiking step over a batch of per-sequence states; probs for each lane.
Tensor batched_step(PredictorModel& model, std::vector<PredictorState>& states,
                    const std::vector<const EventFrame*>& inputs) {
  const int n = static_cast<int>(inputs.size());
  PredictorState merged;
  for (std::size_t layer = 0; layer < states[0].u.size(); ++layer) {
    std::vector<int> shape = states[0].u[layer].shape;
    shape[0] = n;
    Tensor u(shape), y(shape);
    const std::int64_t lane = states[0].u[layer].numel();
    for (int s = 0; s < n; ++s) {
      std::copy(states[s].u[layer].data.begin(),
                states[s].u[layer].data.end(), u.data.begin() + s * lane);
      std::copy(states[s].y[layer].data.begin(),
                states[s].y[layer].data.end(), y.data.begin() + s * lane);
    }
    merged.u.push_back(std::move(u));
    merged.y.push_back(std::move(y));
  }

  Tape tape;
  PredictorStepVars vars = state_vars(tape, merged);
  VarId planes = tape.input(planes_from_frames(inputs));
  VarId probs = predictor_step(tape, model, planes, vars, SnnMode::spiking);

  for (std::size_t layer = 0; layer < states[0].u.size(); ++layer) {
    const Tensor& u = tape.value(vars.u[layer]);
    const Tensor& y = tape.value(vars.y[layer]);
    const std::int64_t lane = states[0].u[layer].numel();
    for (int s = 0; s < n; ++s) {
      std::copy(u.data.begin() + s * lane, u.data.begin() + (s + 1) * lane,
                states[s].u[layer].data.begin());
      std::copy(y.data.begin() + s * lane, y.data.begin() + (s + 1) * lane,
                states[s].y[layer].data.begin());
    }
  }
  return tape.value(probs);
}

// Teacher-forced CE over one BPTT window for a batch of sequences; when opt
// is given, also backprops and takes one optimizer step.
double window_ce(PredictorModel& model,
                 const std::vector<const SequenceRecord*>& seqs,
                 const std::vector<int>& starts,
                 const std::vector<std::vector<EventFrame>>* noisy, int window,
                 Adam* opt) {
  const int n = static_cast<int>(seqs.size());
  Tape tape;
  PredictorState init = initial_state(model, n);
  PredictorStepVars vars = state_vars(tape, init);
  VarId total = -1;
  for (int t = 0; t < window; ++t) {
    std::vector<const EventFrame*> inputs, targets;
    for (int s = 0; s < n; ++s) {
      inputs.push_back(noisy ? &(*noisy)[s][t]
                             : &seqs[s]->frames.frames[starts[s] + t]);
      targets.push_back(&seqs[s]->frames.frames[starts[s] + t + 1]);
    }
    VarId planes = tape.input(planes_from_frames(inputs));
    VarId probs = predictor_step(tape, model, planes, vars, SnnMode::spiking);
    VarId step_loss = tape.nll(probs, classes_from_frames(targets));
    total = (total < 0) ? step_loss : tape.add(total, step_loss);
  }
  total = tape.scale(total, 1.0 / window);
  const double loss = tape.value(total).data[0];
  if (opt) {
    opt->zero_grad();
    tape.backward(total);
    opt->step();
  }
  return loss;
}

std::vector<const SequenceRecord*> validation_slice(
    const std::vector<const SequenceRecord*>& test_seqs, int val_sequences) {
  std::vector<const SequenceRecord*> val;
  for (std::size_t i = 0;
       i < test_seqs.size() && i < static_cast<std::size_t>(val_sequences);
       ++i)
    val.push_back(test_seqs[i]);
  return val;
}

}  // namespace

double predictor_validation_loss(PredictorModel& model, const Dataset& data,
                                 const PredictorTrainConfig& cfg) {
  auto val_seqs = validation_slice(data.split(false), cfg.val_sequences);
  if (val_seqs.empty()) fail(ErrorKind::Config, "empty validation split");
  if (cfg.window + 1 > data.config.frames_per_sequence)
    fail(ErrorKind::Config, "BPTT window longer than sequences");
  double val_sum = 0.0;
  int val_batches = 0;
  for (std::size_t off = 0; off < val_seqs.size();
       off += static_cast<std::size_t>(cfg.batch)) {
    const int n =
        static_cast<int>(std::min<std::size_t>(cfg.batch, val_seqs.size() - off));
    std::vector<const SequenceRecord*> seqs(val_seqs.begin() + off,
                                            val_seqs.begin() + off + n);
    std::vector<int> starts(static_cast<std::size_t>(n), 0);
    val_sum += window_ce(model, seqs, starts, nullptr, cfg.window, nullptr);
    ++val_batches;
  }
  return val_sum / val_batches;
}

OneStepScore score_one_step(PredictorModel& model,
                            const std::vector<const SequenceRecord*>& seqs) {
  OneStepScore score;
  double model_sum = 0.0, base_sum = 0.0;
  const int chunk = 8;
  for (std::size_t off = 0; off < seqs.size();
       off += static_cast<std::size_t>(chunk)) {
    const int n = static_cast<int>(
        std::min<std::size_t>(chunk, seqs.size() - off));
    std::vector<PredictorState> states;
    for (int s = 0; s < n; ++s) states.push_back(initial_state(model, 1));
    const int steps = seqs[off]->frames.count() - 1;
    for (int t = 0; t < steps; ++t) {
      std::vector<const EventFrame*> inputs;
      for (int s = 0; s < n; ++s)
        inputs.push_back(&seqs[off + s]->frames.frames[t]);
      Tensor probs = batched_step(model, states, inputs);
      for (int s = 0; s < n; ++s) {
        ProbFrame prob = prob_frame_from(probs, s, model.arch.geom);
        EventFrame pred = sample_events(prob, SampleMode::argmax);
        const EventFrame& truth = seqs[off + s]->frames.frames[t + 1];
        model_sum += region_esim(pred, truth, 4).value;
        base_sum +=
            region_esim(persistence_baseline(seqs[off + s]->frames.frames[t]),
                        truth, 4)
                .value;
        ++score.frames_scored;
      }
    }
  }
  if (score.frames_scored == 0)
    fail(ErrorKind::Range, "no frames to score");
  score.model_esim4 = model_sum / score.frames_scored;
  score.persistence_esim4 = base_sum / score.frames_scored;
  return score;
}

std::vector<EpochStats> train_predictor(PredictorModel& model,
                                        const Dataset& data,
                                        const PredictorTrainConfig& cfg,
                                        std::ostream* log) {
  auto train_seqs = data.split(true);
  auto test_seqs = data.split(false);
  if (train_seqs.empty()) fail(ErrorKind::Config, "empty training split");
  const int frames = data.config.frames_per_sequence;
  if (cfg.window + 1 > frames)
    fail(ErrorKind::Config, "BPTT window longer than sequences");

  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  Adam opt(model.parameters(), adam_cfg);

  std::vector<EpochStats> curve;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto rng = make_rng(cfg.seed, 1000 + static_cast<std::uint64_t>(epoch));
    std::vector<int> order(train_seqs.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t off = 0; off < order.size();
         off += static_cast<std::size_t>(cfg.batch)) {
      const int n = static_cast<int>(
          std::min<std::size_t>(cfg.batch, order.size() - off));
      std::vector<const SequenceRecord*> seqs;
      std::vector<int> starts;
      for (int s = 0; s < n; ++s) {
        seqs.push_back(train_seqs[order[off + s]]);
        std::uniform_int_distribution<int> start_dist(0,
                                                      frames - cfg.window - 1);
        starts.push_back(start_dist(rng));
      }

      // Noise augmentation: spurious events on the inputs, clean targets, so
      // the model learns to reproduce structure and drop clutter.
      std::vector<std::vector<EventFrame>> noisy;
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      bool use_noise = unit(rng) < cfg.noise_aug_prob;
      if (use_noise) {
        std::uniform_real_distribution<double> level_dist(0.05,
                                                          cfg.noise_aug_max);
        const double level = level_dist(rng);
        noisy.resize(static_cast<std::size_t>(n));
        for (int s = 0; s < n; ++s)
          for (int t = 0; t < cfg.window; ++t) {
            const std::uint64_t stream =
                ((static_cast<std::uint64_t>(epoch) * 4096 + off + s) << 8) +
                static_cast<std::uint64_t>(t);
            noisy[s].push_back(
                inject_noise(seqs[s]->frames.frames[starts[s] + t], level,
                             mix_seed(cfg.seed, stream))
                    .frame);
          }
      }

      const double loss = window_ce(model, seqs, starts,
                                    use_noise ? &noisy : nullptr, cfg.window,
                                    &opt);
      if (!std::isfinite(loss))
        fail(ErrorKind::Diverged,
             "non-finite loss at epoch " + std::to_string(epoch));
      opt.check_finite("epoch " + std::to_string(epoch));
      loss_sum += loss;
      ++batches;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / std::max(batches, 1);
    stats.val_loss = test_seqs.empty()
                         ? 0.0
                         : predictor_validation_loss(model, data, cfg);
    curve.push_back(stats);
    if (log)
      (*log) << "epoch " << epoch << " train " << stats.train_loss << " val "
             << stats.val_loss << "\n";
  }
  return curve;
}

}  // namespace evatt
