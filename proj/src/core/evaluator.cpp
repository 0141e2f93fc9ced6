#include "core/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"

namespace evatt {

namespace {

std::string meta_get(
    const std::vector<std::pair<std::string, std::string>>& meta,
    const std::string& key) {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  fail(ErrorKind::Config, "model spec missing key '" + key + "'");
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  std::string item;
  for (std::size_t pos = 0; pos <= s.size();) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    item = s.substr(pos, comma - pos);
    if (item.empty()) fail(ErrorKind::Parse, "empty entry in list '" + s + "'");
    out.push_back(std::stoi(item));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> EvaluatorArch::to_meta()
    const {
  return {
      {"width", std::to_string(geom.width)},
      {"height", std::to_string(geom.height)},
      {"channels", join_ints(channels)},
      {"kernel", std::to_string(kernel)},
      {"steps", std::to_string(steps)},
      {"tau", std::to_string(lif.tau)},
      {"v_th", std::to_string(lif.v_th)},
      {"alpha", std::to_string(lif.alpha)},
  };
}

EvaluatorArch EvaluatorArch::from_meta(
    const std::vector<std::pair<std::string, std::string>>& meta) {
  EvaluatorArch a;
  a.geom = {std::stoi(meta_get(meta, "width")),
            std::stoi(meta_get(meta, "height"))};
  a.channels = split_ints(meta_get(meta, "channels"));
  a.kernel = std::stoi(meta_get(meta, "kernel"));
  a.steps = std::stoi(meta_get(meta, "steps"));
  a.lif.tau = std::stod(meta_get(meta, "tau"));
  a.lif.v_th = std::stod(meta_get(meta, "v_th"));
  a.lif.alpha = std::stod(meta_get(meta, "alpha"));
  if (a.channels.empty())
    fail(ErrorKind::Config, "model spec has empty conv stack");
  if (a.steps < 1) fail(ErrorKind::Config, "presentation needs >= 1 step");
  return a;
}

std::vector<Parameter*> EvaluatorModel::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : convs) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  out.push_back(&readout_w);
  out.push_back(&readout_b);
  return out;
}

EvaluatorModel make_evaluator(const EvaluatorArch& arch, std::uint64_t seed) {
  EvaluatorModel m;
  m.arch = arch;
  const int k = arch.kernel;
  int prev = 4;
  for (int i = 0; i < arch.depth(); ++i) {
    const int ch = arch.channels[i];
    m.convs.push_back(
        {Parameter("conv" + std::to_string(i) + ".w",
                   Tensor({ch, prev, k, k})),
         Parameter("conv" + std::to_string(i) + ".b", Tensor({ch}))});
    prev = ch;
  }
  m.readout_w = Parameter("readout.w", Tensor({1, arch.channels.back()}));
  m.readout_b = Parameter("readout.b", Tensor({1}));
  int idx = 0;
  for (Parameter* p : m.parameters()) {
    if (p->value.ndim() > 1) init_kaiming_uniform(*p, mix_seed(seed, idx));
    ++idx;
  }
  return m;
}

Checkpoint evaluator_checkpoint(EvaluatorModel& model) {
  Checkpoint c;
  c.kind = "evaluator";
  c.meta = model.arch.to_meta();
  for (Parameter* p : model.parameters())
    c.tensors.emplace_back(p->name, p->value);
  return c;
}

EvaluatorModel evaluator_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != "evaluator")
    fail(ErrorKind::Config,
         "checkpoint kind '" + ckpt.kind + "' is not an evaluator");
  EvaluatorModel m = make_evaluator(EvaluatorArch::from_meta(ckpt.meta), 0);
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

Tensor stack_frame_pairs(
    const std::vector<std::pair<const EventFrame*, const EventFrame*>>&
        pairs) {
  if (pairs.empty()) fail(ErrorKind::Range, "no frame pairs given");
  const Geometry g = pairs[0].first->geom;
  const std::int64_t plane = g.cells();
  Tensor t({static_cast<int>(pairs.size()), 4, g.height, g.width});
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    const EventFrame& ref = *pairs[s].first;
    const EventFrame& pred = *pairs[s].second;
    if (!(ref.geom == g) || !(pred.geom == g))
      fail(ErrorKind::Dimension, "mixed geometries in one batch");
    double* base = t.ptr() + static_cast<std::int64_t>(s) * 4 * plane;
    for (std::int64_t i = 0; i < plane; ++i) {
      base[i] = ref.cells[i] > 0 ? 1.0 : 0.0;
      base[plane + i] = ref.cells[i] < 0 ? 1.0 : 0.0;
      base[2 * plane + i] = pred.cells[i] > 0 ? 1.0 : 0.0;
      base[3 * plane + i] = pred.cells[i] < 0 ? 1.0 : 0.0;
    }
  }
  return t;
}

VarId evaluator_forward(Tape& tape, EvaluatorModel& model, VarId input4,
                        SnnMode mode) {
  const EvaluatorArch& arch = model.arch;
  const int n = tape.value(input4).dim(0);
  const int k = arch.kernel;

  std::vector<VarId> u, y;
  int h = tape.value(input4).dim(2), w = tape.value(input4).dim(3);
  for (int i = 0; i < arch.depth(); ++i) {
    h = conv_out_extent(h, k, 2, k / 2);
    w = conv_out_extent(w, k, 2, k / 2);
    u.push_back(tape.input(Tensor({n, arch.channels[i], h, w})));
    y.push_back(tape.input(Tensor({n, arch.channels[i], h, w})));
  }

  VarId rate_sum = -1;
  for (int step = 0; step < arch.steps; ++step) {
    VarId x = input4;
    for (int i = 0; i < arch.depth(); ++i) {
      VarId cur =
          tape.conv2d(x, model.convs[i].w, &model.convs[i].b, 2, k / 2);
      VarId nu = tape.lif_update(cur, u[i], y[i], arch.lif.tau, mode);
      VarId ny = tape.spike(nu, arch.lif.v_th, arch.lif.alpha, mode,
                            "eval" + std::to_string(i));
      u[i] = nu;
      y[i] = ny;
      x = ny;
    }
    rate_sum = rate_sum < 0 ? x : tape.add(rate_sum, x);
  }
  VarId rate = tape.scale(rate_sum, 1.0 / arch.steps);
  VarId pooled = tape.global_avg_pool(rate);
  VarId out = tape.linear(pooled, model.readout_w, &model.readout_b);
  return tape.sigmoid(out);
}

double estimate_esim(EvaluatorModel& model, const EventFrame& reference,
                     const EventFrame& predicted) {
  if (!(reference.geom == predicted.geom) ||
      !(reference.geom == model.arch.geom))
    fail(ErrorKind::Dimension, "estimate_esim geometry mismatch");
  Tape tape;
  VarId input4 = tape.input(stack_frame_pairs({{&reference, &predicted}}));
  VarId out = evaluator_forward(tape, model, input4, SnnMode::spiking);
  return tape.value(out).data[0];
}

EvalCorpus build_rollout_corpus(PredictorModel& predictor, const Dataset& data,
                                bool train_split, std::vector<int> anchors,
                                int max_horizon) {
  if (anchors.empty()) fail(ErrorKind::Range, "no rollout anchors given");
  if (max_horizon < 1) fail(ErrorKind::Range, "horizon must be >= 1");
  EvalCorpus corpus;
  for (const SequenceRecord* rec : data.split(train_split)) {
    for (int anchor : anchors) {
      if (anchor < 1 ||
          anchor + max_horizon > rec->frames.count())
        fail(ErrorKind::Range, "anchor/horizon exceed sequence length");
      RolloutResult roll =
          rollout(predictor, rec->frames, anchor, max_horizon, Feedback::self);
      const EventFrame& reference = rec->frames.frames[anchor - 1];
      for (int h = 1; h <= max_horizon; ++h) {
        EvalSample sample;
        sample.reference = reference;
        sample.prediction = roll.predictions.frames[h - 1];
        sample.target =
            region_esim(sample.prediction, rec->frames.frames[anchor + h - 1],
                        4)
                .value;
        sample.horizon = h;
        corpus.samples.push_back(std::move(sample));
      }
    }
  }
  return corpus;
}

std::vector<double> estimate_all(EvaluatorModel& model,
                                 const EvalCorpus& corpus, int batch) {
  std::vector<double> out;
  out.reserve(corpus.samples.size());
  for (std::size_t off = 0; off < corpus.samples.size();
       off += static_cast<std::size_t>(batch)) {
    const std::size_t n =
        std::min<std::size_t>(batch, corpus.samples.size() - off);
    std::vector<std::pair<const EventFrame*, const EventFrame*>> pairs;
    for (std::size_t s = 0; s < n; ++s)
      pairs.emplace_back(&corpus.samples[off + s].reference,
                         &corpus.samples[off + s].prediction);
    Tape tape;
    VarId input4 = tape.input(stack_frame_pairs(pairs));
    VarId est = evaluator_forward(tape, model, input4, SnnMode::spiking);
    const Tensor& v = tape.value(est);
    for (std::size_t s = 0; s < n; ++s) out.push_back(v.data[s]);
  }
  return out;
}

double evaluator_corpus_mse(EvaluatorModel& model, const EvalCorpus& corpus,
                            int batch) {
  if (corpus.samples.empty()) fail(ErrorKind::Range, "empty corpus");
  std::vector<double> est = estimate_all(model, corpus, batch);
  double sum = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double d = est[i] - corpus.samples[i].target;
    sum += d * d;
  }
  return sum / static_cast<double>(est.size());
}

std::vector<EpochStats> train_evaluator(EvaluatorModel& model,
                                        const EvalCorpus& train,
                                        const EvalCorpus* val,
                                        const EvaluatorTrainConfig& cfg,
                                        std::ostream* log) {
  if (train.samples.empty()) fail(ErrorKind::Config, "empty training corpus");
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  Adam opt(model.parameters(), adam_cfg);

  std::vector<EpochStats> curve;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto rng = make_rng(cfg.seed, 2000 + static_cast<std::uint64_t>(epoch));
    std::vector<std::size_t> order(train.samples.size());
    std::iota(order.begin(), order.end(), 0u);
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t off = 0; off < order.size();
         off += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t n =
          std::min<std::size_t>(cfg.batch, order.size() - off);
      std::vector<std::pair<const EventFrame*, const EventFrame*>> pairs;
      Tensor targets({static_cast<int>(n), 1});
      for (std::size_t s = 0; s < n; ++s) {
        const EvalSample& sample = train.samples[order[off + s]];
        pairs.emplace_back(&sample.reference, &sample.prediction);
        targets.data[s] = sample.target;
      }
      Tape tape;
      VarId input4 = tape.input(stack_frame_pairs(pairs));
      VarId est = evaluator_forward(tape, model, input4, SnnMode::spiking);
      VarId loss = tape.mse(est, targets);
      const double loss_value = tape.value(loss).data[0];
      if (!std::isfinite(loss_value))
        fail(ErrorKind::Diverged,
             "non-finite loss at epoch " + std::to_string(epoch));
      opt.zero_grad();
      tape.backward(loss);
      opt.check_finite("epoch " + std::to_string(epoch));
      opt.step();
      loss_sum += loss_value;
      ++batches;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / std::max(batches, 1);
    if (val && !val->samples.empty())
      stats.val_loss = evaluator_corpus_mse(model, *val, cfg.batch);
    curve.push_back(stats);
    if (log)
      (*log) << "epoch " << epoch << " train " << stats.train_loss << " val "
             << stats.val_loss << "\n";
  }
  return curve;
}

}  // namespace evatt
