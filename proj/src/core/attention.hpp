#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/evaluator.hpp"
#include "core/predictor.hpp"

namespace evatt {

struct GatePolicy {
  enum class Kind { predictive, random, periodic };
  Kind kind = Kind::predictive;
  double threshold = 0.5;  // predictive: attend iff estimate < threshold
  double rate = 0.5;       // random: attend probability per post-warmup step
  std::uint64_t seed = 0;  // random
  int period = 2;          // periodic: attend when (step-warmup-phase)%period==0
  int phase = 0;

  static GatePolicy predictive(double theta);
  static GatePolicy random(double rate, std::uint64_t seed);
  static GatePolicy periodic(int period, int phase = 0);
  std::string name() const;
};

struct LinkEnergyModel {
  int bits_per_event = 24;  // 3 bytes per AER tuple
  double energy_per_bit = 1.4e-7;  // J/bit; plausible USB range is
                                   // [3.1e-8, 1.4e-7]
};
constexpr double kEnergyPerBitMin = 3.1e-8;
constexpr double kEnergyPerBitMax = 1.4e-7;

struct StepTrace {
  int step = 0;
  bool attended = false;
  bool has_estimate = false;
  double estimated_score = 0.0;
  double actual_esim4 = 0.0;
  int input_event_count = 0;       // events entering the predictor this step
  int prediction_event_count = 0;  // events in this step's argmax prediction
  std::int64_t link_bits = 0;      // sensed events * bits_per_event, 0 gated
  std::int64_t encoder_spike_count = 0;
};

struct AttentionTrace {
  Geometry geom;
  int warmup = 3;
  int bits_per_event = 24;
  std::vector<StepTrace> steps;
  // Filled when run with retain_frames: what the processor believed each
  // step, and the raw argmax prediction for the same step.
  std::vector<EventFrame> awareness_frames;
  std::vector<EventFrame> predicted_frames;

  double gating_rate() const;     // gated / post-warmup steps
  double awareness() const;       // mean actual esim4 over post-warmup steps
  double attend_rate() const { return 1.0 - gating_rate(); }
  std::int64_t link_bits() const;
  double link_energy(const LinkEnergyModel& model) const;
  std::int64_t total_spikes() const;
};

// One gated sensor-predictor loop over a sensor sequence. truth, when given,
// is the clean reference stream for the offline Esim4 column (defaults to the
// sensor stream itself). The evaluator is only consulted by the predictive
// policy; scores attended frames against the most recent attended frame.
AttentionTrace run_closed_loop(const FrameSequence& sensor,
                               const FrameSequence* truth,
                               PredictorModel& predictor,
                               EvaluatorModel* evaluator,
                               const GatePolicy& policy, int warmup = 3,
                               bool retain_frames = false,
                               const LinkEnergyModel& link = {});

// Mean post-warmup attend rate of the predictive policy at threshold theta
// over a set of sequences.
double measure_attend_rate(const std::vector<const SequenceRecord*>& seqs,
                           PredictorModel& predictor,
                           EvaluatorModel& evaluator, double theta,
                           int warmup);

// Bisect theta until the measured attend rate is within tol of target.
double calibrate_theta(const std::vector<const SequenceRecord*>& seqs,
                       PredictorModel& predictor, EvaluatorModel& evaluator,
                       double target_attend_rate, int warmup,
                       double tol = 0.02, int max_iters = 12);

struct PolicyRow {
  std::string policy;
  double theta = 0.0;       // predictive threshold that set the matched rate
  std::uint64_t seed = 0;
  double attend_rate = 0.0;      // measured, post-warmup
  double awareness_mean = 0.0;   // over sequences
  double awareness_std = 0.0;
  double link_bits_mean = 0.0;   // per sequence
  double spikes_mean = 0.0;      // per sequence
};

// For each threshold: run predictive on every sequence, then random and
// periodic at the matched attend rate, one row per (policy, threshold, seed).
std::vector<PolicyRow> compare_policies(
    const std::vector<const SequenceRecord*>& seqs, PredictorModel& predictor,
    EvaluatorModel& evaluator, const std::vector<double>& thresholds,
    const std::vector<std::uint64_t>& seeds, int warmup = 3);

// The published arithmetic for a 128x128 @30fps sensor with 10% pixel
// activity at 24 bits per event: pixel_rate * activity * bits.
double link_bitrate(double pixel_rate, double activity, int bits_per_event);

}  // namespace evatt
