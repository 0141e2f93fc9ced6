#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/predictor.hpp"

namespace evatt {

struct EvaluatorArch {
  Geometry geom{64, 64};
  std::vector<int> channels{8, 16, 32};
  int kernel = 3;  // stride 2, pad kernel/2
  int steps = 10;  // presentation length
  LifParams lif;

  int depth() const { return static_cast<int>(channels.size()); }
  std::vector<std::pair<std::string, std::string>> to_meta() const;
  static EvaluatorArch from_meta(
      const std::vector<std::pair<std::string, std::string>>& meta);
};

// Spiking conv stack fed the same 4-channel (reference +/-, prediction +/-)
// map for `steps` ticks; the last layer's mean spike rate is pooled and read
// out through one logistic unit.
struct EvaluatorModel {
  EvaluatorArch arch;
  std::vector<ConvLayer> convs;
  Parameter readout_w;  // [1, channels.back()]
  Parameter readout_b;  // [1]

  std::vector<Parameter*> parameters();
};

EvaluatorModel make_evaluator(const EvaluatorArch& arch, std::uint64_t seed);

Checkpoint evaluator_checkpoint(EvaluatorModel& model);
EvaluatorModel evaluator_from_checkpoint(const Checkpoint& ckpt);

Tensor stack_frame_pairs(
    const std::vector<std::pair<const EventFrame*, const EventFrame*>>& pairs);

// Tape-level forward over a [N,4,H,W] input; returns the [N,1] estimates.
VarId evaluator_forward(Tape& tape, EvaluatorModel& model, VarId input4,
                        SnnMode mode);

double estimate_esim(EvaluatorModel& model, const EventFrame& reference,
                     const EventFrame& predicted);

struct EvalSample {
  EventFrame reference;   // most recent attended frame
  EventFrame prediction;  // argmax self-rollout prediction
  double target = 0.0;    // true Esim4 of prediction vs ground truth
  int horizon = 0;
};

struct EvalCorpus {
  std::vector<EvalSample> samples;
};

// Frozen-predictor self rollouts from each anchor; one sample per horizon
// 1..max_horizon per anchor per sequence.
EvalCorpus build_rollout_corpus(PredictorModel& predictor, const Dataset& data,
                                bool train_split, std::vector<int> anchors,
                                int max_horizon);

std::vector<double> estimate_all(EvaluatorModel& model,
                                 const EvalCorpus& corpus, int batch = 8);

// Mean squared error of the model's estimates against the corpus targets;
// the quantity train_evaluator reports as val_loss.
double evaluator_corpus_mse(EvaluatorModel& model, const EvalCorpus& corpus,
                            int batch = 8);

struct EvaluatorTrainConfig {
  int epochs = 40;
  int batch = 8;
  double lr = 1e-3;
  std::uint64_t seed = 1;
};

std::vector<EpochStats> train_evaluator(EvaluatorModel& model,
                                        const EvalCorpus& train,
                                        const EvalCorpus* val,
                                        const EvaluatorTrainConfig& cfg,
                                        std::ostream* log = nullptr);

}  // namespace evatt
