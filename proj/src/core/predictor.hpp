#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/event.hpp"
#include "core/scene.hpp"
#include "core/snn.hpp"
#include "core/tape.hpp"

namespace evatt {

// Per-pixel class probabilities, channel-major [class][y][x].
// Class 0 = no event, 1 = positive, 2 = negative.
struct ProbFrame {
  Geometry geom;
  std::vector<double> p;

  ProbFrame() = default;
  explicit ProbFrame(Geometry g) : geom(g), p(3 * g.cells(), 0.0) {}
  double at(int x, int y, int cls) const {
    return p[static_cast<std::size_t>(cls) * geom.cells() + y * geom.width +
             x];
  }
};

inline int class_of_value(int v) { return v == 0 ? 0 : (v > 0 ? 1 : 2); }
inline int value_of_class(int c) { return c == 0 ? 0 : (c == 1 ? +1 : -1); }

struct PredictorArch {
  Geometry geom{64, 64};
  std::vector<int> encoder_channels{16, 32, 64};
  int residual_blocks = 2;
  std::vector<int> decoder_channels{32, 16};  // final deconv always emits 3
  int enc_kernel = 3;   // stride 2, pad 1
  int dec_kernel = 4;   // stride 2, pad 1
  LifParams lif;

  int depth() const { return static_cast<int>(encoder_channels.size()); }
  std::vector<std::pair<std::string, std::string>> to_meta() const;
  static PredictorArch from_meta(
      const std::vector<std::pair<std::string, std::string>>& meta);
};

struct ConvLayer {
  Parameter w;
  Parameter b;
};

// Spiking conv encoder, analog residual bottleneck, analog deconv decoder
// with 1x1-projected skips from the encoder spike maps, per-pixel softmax.
struct PredictorModel {
  PredictorArch arch;
  std::vector<ConvLayer> encoder;
  std::vector<ConvLayer> residual;
  std::vector<ConvLayer> decoder;
  std::vector<ConvLayer> skips;  // decoder j takes encoder depth-2-j, j<depth-1

  std::vector<Parameter*> parameters();
};

PredictorModel make_predictor(const PredictorArch& arch, std::uint64_t seed);

Checkpoint predictor_checkpoint(PredictorModel& model);
PredictorModel predictor_from_checkpoint(const Checkpoint& ckpt);

// Encoder membrane potentials and spike outputs, one pair per layer.
struct PredictorState {
  std::vector<Tensor> u, y;
};
PredictorState initial_state(const PredictorModel& model, int batch);

// Tape-level single step shared by inference and BPTT training. planes is a
// [N,2,H,W] variable; state vars are replaced with the post-step ones.
struct PredictorStepVars {
  std::vector<VarId> u, y;
};
VarId predictor_step(Tape& tape, PredictorModel& model, VarId planes,
                     PredictorStepVars& state, SnnMode mode);

Tensor planes_from_frames(const std::vector<const EventFrame*>& frames);
Tensor planes_from_frame(const EventFrame& frame);
std::vector<std::uint8_t> classes_from_frames(
    const std::vector<const EventFrame*>& frames);

// One forward pass; the returned state carries the temporal context.
std::pair<PredictorState, ProbFrame> predict_next(
    PredictorModel& model, const PredictorState& state,
    const EventFrame& input, SpikeRecorder* recorder = nullptr);

enum class SampleMode { argmax, draw };
// argmax breaks ties toward no-event; draw is a seeded categorical sample.
EventFrame sample_events(const ProbFrame& prob, SampleMode mode,
                         std::uint64_t seed = 0);

// -(1/(H*W)) sum log p(target class), log argument clamped to >= 1e-12.
double ce_loss(const ProbFrame& prob, const EventFrame& target);

EventFrame persistence_baseline(const EventFrame& input);

enum class Feedback { sensed, self };

struct RolloutResult {
  // predictions[i] is the argmax frame predicted for seq index seed_count+i.
  FrameSequence predictions;
  std::vector<ProbFrame> probs;
  std::vector<int> frames_read;  // audit: seq indices consumed as input
};

RolloutResult rollout(PredictorModel& model, const FrameSequence& seq,
                      int seed_count, int horizon, Feedback feedback,
                      SpikeRecorder* recorder = nullptr);

struct PredictorTrainConfig {
  int epochs = 200;
  int batch = 8;
  int window = 12;  // BPTT unroll length (frames per crop)
  double lr = 1e-3;
  std::uint64_t seed = 1;
  double noise_aug_prob = 0.5;  // chance a crop trains on a noisy input copy
  double noise_aug_max = 0.5;
  int val_sequences = 16;  // fixed held-out windows scored every epoch
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

std::vector<EpochStats> train_predictor(PredictorModel& model,
                                        const Dataset& data,
                                        const PredictorTrainConfig& cfg,
                                        std::ostream* log = nullptr);

// Teacher-forced CE over the leading window of the first val_sequences test
// sequences; the quantity train_predictor reports as val_loss.
double predictor_validation_loss(PredictorModel& model, const Dataset& data,
                                 const PredictorTrainConfig& cfg);

// Mean one-step Esim4 of argmax predictions vs truth over a split, plus the
// persistence baseline measured on the same frames.
struct OneStepScore {
  double model_esim4 = 0.0;
  double persistence_esim4 = 0.0;
  int frames_scored = 0;
};
OneStepScore score_one_step(PredictorModel& model,
                            const std::vector<const SequenceRecord*>& seqs);

}  // namespace evatt
