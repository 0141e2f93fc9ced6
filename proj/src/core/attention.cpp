#include "core/attention.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"

namespace evatt {

GatePolicy GatePolicy::predictive(double theta) {
  if (theta < 0.0 || theta > 1.0)
    fail(ErrorKind::Range, "threshold must lie in [0,1]");
  GatePolicy p;
  p.kind = Kind::predictive;
  p.threshold = theta;
  return p;
}

GatePolicy GatePolicy::random(double rate, std::uint64_t seed) {
  if (rate < 0.0 || rate > 1.0)
    fail(ErrorKind::Range, "attend rate must lie in [0,1]");
  GatePolicy p;
  p.kind = Kind::random;
  p.rate = rate;
  p.seed = seed;
  return p;
}

GatePolicy GatePolicy::periodic(int period, int phase) {
  if (period < 1) fail(ErrorKind::Range, "period must be >= 1");
  GatePolicy p;
  p.kind = Kind::periodic;
  p.period = period;
  p.phase = phase;
  return p;
}

std::string GatePolicy::name() const {
  switch (kind) {
    case Kind::predictive: return "predictive";
    case Kind::random: return "random";
    case Kind::periodic: return "periodic";
  }
  return "?";
}

double AttentionTrace::gating_rate() const {
  const int post = static_cast<int>(steps.size()) - warmup;
  if (post <= 0) fail(ErrorKind::Range, "trace has no post-warmup steps");
  int gated = 0;
  for (std::size_t t = static_cast<std::size_t>(warmup); t < steps.size(); ++t)
    gated += steps[t].attended ? 0 : 1;
  return static_cast<double>(gated) / post;
}

double AttentionTrace::awareness() const {
  const int post = static_cast<int>(steps.size()) - warmup;
  if (post <= 0) fail(ErrorKind::Range, "trace has no post-warmup steps");
  double sum = 0.0;
  for (std::size_t t = static_cast<std::size_t>(warmup); t < steps.size(); ++t)
    sum += steps[t].actual_esim4;
  return sum / post;
}

std::int64_t AttentionTrace::link_bits() const {
  std::int64_t bits = 0;
  for (const auto& s : steps) bits += s.link_bits;
  return bits;
}

double AttentionTrace::link_energy(const LinkEnergyModel& model) const {
  return static_cast<double>(link_bits()) * model.energy_per_bit;
}

std::int64_t AttentionTrace::total_spikes() const {
  std::int64_t spikes = 0;
  for (const auto& s : steps) spikes += s.encoder_spike_count;
  return spikes;
}

AttentionTrace run_closed_loop(const FrameSequence& sensor,
                               const FrameSequence* truth,
                               PredictorModel& predictor,
                               EvaluatorModel* evaluator,
                               const GatePolicy& policy, int warmup,
                               bool retain_frames,
                               const LinkEnergyModel& link) {
  if (warmup < 1) fail(ErrorKind::Config, "warmup must be >= 1");
  if (sensor.count() < warmup)
    fail(ErrorKind::Config, "sequence shorter than warmup");
  if (!(sensor.geom == predictor.arch.geom))
    fail(ErrorKind::Dimension, "sensor geometry does not match predictor");
  if (policy.kind == GatePolicy::Kind::predictive && !evaluator)
    fail(ErrorKind::Config, "predictive policy needs an evaluator");
  const FrameSequence& ref_truth = truth ? *truth : sensor;
  if (ref_truth.count() < sensor.count())
    fail(ErrorKind::Dimension, "truth stream shorter than sensor stream");

  AttentionTrace trace;
  trace.geom = sensor.geom;
  trace.warmup = warmup;
  trace.bits_per_event = link.bits_per_event;

  PredictorState state = initial_state(predictor, 1);
  const EventFrame* reference = nullptr;  // most recent attended frame
  ProbFrame prob;
  auto rng = make_rng(policy.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int t = 0; t < sensor.count(); ++t) {
    EventFrame predicted =
        t == 0 ? EventFrame(sensor.geom, 0)
               : sample_events(prob, SampleMode::argmax);
    predicted.frame_index = t;

    StepTrace step;
    step.step = t;
    step.prediction_event_count = predicted.nonzero_count();

    if (t < warmup) {
      step.attended = true;
    } else {
      switch (policy.kind) {
        case GatePolicy::Kind::predictive: {
          const double est = estimate_esim(*evaluator, *reference, predicted);
          step.has_estimate = true;
          step.estimated_score = est;
          step.attended = policy.threshold >= 1.0 || est < policy.threshold;
          break;
        }
        case GatePolicy::Kind::random:
          step.attended = unit(rng) < policy.rate;
          break;
        case GatePolicy::Kind::periodic: {
          const int k = policy.period;
          const int offset = (((t - warmup - policy.phase) % k) + k) % k;
          step.attended = offset == 0;
          break;
        }
      }
    }

    const EventFrame& input = step.attended ? sensor.frames[t] : predicted;
    const EventFrame& awareness = input;
    if (step.attended) {
      reference = &sensor.frames[t];
      step.link_bits = static_cast<std::int64_t>(input.nonzero_count()) *
                       link.bits_per_event;
    }
    step.input_event_count = input.nonzero_count();
    step.actual_esim4 =
        region_esim(awareness, ref_truth.frames[t], 4).value;

    SpikeCounter counter;
    auto [next, next_prob] = predict_next(predictor, state, input, &counter);
    state = std::move(next);
    prob = std::move(next_prob);
    step.encoder_spike_count = counter.total;

    trace.steps.push_back(step);
    if (retain_frames) {
      trace.awareness_frames.push_back(awareness);
      trace.predicted_frames.push_back(std::move(predicted));
    }
  }
  return trace;
}

double measure_attend_rate(const std::vector<const SequenceRecord*>& seqs,
                           PredictorModel& predictor,
                           EvaluatorModel& evaluator, double theta,
                           int warmup) {
  if (seqs.empty()) fail(ErrorKind::Range, "no sequences to measure");
  double sum = 0.0;
  for (const SequenceRecord* rec : seqs) {
    AttentionTrace trace =
        run_closed_loop(rec->frames, nullptr, predictor, &evaluator,
                        GatePolicy::predictive(theta), warmup);
    sum += trace.attend_rate();
  }
  return sum / static_cast<double>(seqs.size());
}

double calibrate_theta(const std::vector<const SequenceRecord*>& seqs,
                       PredictorModel& predictor, EvaluatorModel& evaluator,
                       double target_attend_rate, int warmup, double tol,
                       int max_iters) {
  double lo = 0.0, hi = 1.0;
  double best_theta = 0.5, best_err = 2.0;
  for (int it = 0; it < max_iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double rate =
        measure_attend_rate(seqs, predictor, evaluator, mid, warmup);
    const double err = std::abs(rate - target_attend_rate);
    if (err < best_err) {
      best_err = err;
      best_theta = mid;
    }
    if (err <= tol) break;
    if (rate < target_attend_rate)
      lo = mid;
    else
      hi = mid;
  }
  return best_theta;
}

namespace {

struct RunStats {
  double attend_rate = 0.0;
  double awareness_mean = 0.0;
  double awareness_std = 0.0;
  double bits_mean = 0.0;
  double spikes_mean = 0.0;
};

RunStats stats_over(const std::vector<AttentionTrace>& traces) {
  RunStats st;
  const double n = static_cast<double>(traces.size());
  std::vector<double> awareness;
  for (const auto& t : traces) {
    st.attend_rate += t.attend_rate() / n;
    awareness.push_back(t.awareness());
    st.bits_mean += static_cast<double>(t.link_bits()) / n;
    st.spikes_mean += static_cast<double>(t.total_spikes()) / n;
  }
  double mean = 0.0;
  for (double a : awareness) mean += a / n;
  double var = 0.0;
  for (double a : awareness) var += (a - mean) * (a - mean) / n;
  st.awareness_mean = mean;
  st.awareness_std = std::sqrt(var);
  return st;
}

}  // namespace

std::vector<PolicyRow> compare_policies(
    const std::vector<const SequenceRecord*>& seqs, PredictorModel& predictor,
    EvaluatorModel& evaluator, const std::vector<double>& thresholds,
    const std::vector<std::uint64_t>& seeds, int warmup) {
  if (seqs.empty()) fail(ErrorKind::Range, "no sequences to compare on");
  if (seeds.empty()) fail(ErrorKind::Range, "need at least one seed");
  std::vector<PolicyRow> rows;

  for (double theta : thresholds) {
    std::vector<AttentionTrace> pred_traces;
    for (const SequenceRecord* rec : seqs)
      pred_traces.push_back(run_closed_loop(rec->frames, nullptr, predictor,
                                            &evaluator,
                                            GatePolicy::predictive(theta),
                                            warmup));
    const RunStats pred_stats = stats_over(pred_traces);
    const double matched_rate = pred_stats.attend_rate;

    for (std::uint64_t seed : seeds) {
      PolicyRow row;
      row.policy = "predictive";
      row.theta = theta;
      row.seed = seed;
      row.attend_rate = pred_stats.attend_rate;
      row.awareness_mean = pred_stats.awareness_mean;
      row.awareness_std = pred_stats.awareness_std;
      row.link_bits_mean = pred_stats.bits_mean;
      row.spikes_mean = pred_stats.spikes_mean;
      rows.push_back(row);
    }

    for (std::uint64_t seed : seeds) {
      std::vector<AttentionTrace> traces;
      for (const SequenceRecord* rec : seqs) {
        GatePolicy p = GatePolicy::random(
            matched_rate, mix_seed(seed, static_cast<std::uint64_t>(rec->id)));
        traces.push_back(run_closed_loop(rec->frames, nullptr, predictor,
                                         nullptr, p, warmup));
      }
      const RunStats st = stats_over(traces);
      PolicyRow row;
      row.policy = "random";
      row.theta = theta;
      row.seed = seed;
      row.attend_rate = st.attend_rate;
      row.awareness_mean = st.awareness_mean;
      row.awareness_std = st.awareness_std;
      row.link_bits_mean = st.bits_mean;
      row.spikes_mean = st.spikes_mean;
      rows.push_back(row);
    }

    {
      const int period = std::max(
          1, static_cast<int>(std::lround(1.0 / std::max(matched_rate,
                                                         1e-9))));
      std::vector<AttentionTrace> traces;
      for (const SequenceRecord* rec : seqs)
        traces.push_back(run_closed_loop(rec->frames, nullptr, predictor,
                                         nullptr, GatePolicy::periodic(period),
                                         warmup));
      const RunStats st = stats_over(traces);
      for (std::uint64_t seed : seeds) {
        PolicyRow row;
        row.policy = "periodic";
        row.theta = theta;
        row.seed = seed;
        row.attend_rate = st.attend_rate;
        row.awareness_mean = st.awareness_mean;
        row.awareness_std = st.awareness_std;
        row.link_bits_mean = st.bits_mean;
        row.spikes_mean = st.spikes_mean;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

double link_bitrate(double pixel_rate, double activity, int bits_per_event) {
  if (pixel_rate <= 0 || activity < 0 || activity > 1 || bits_per_event <= 0)
    fail(ErrorKind::Range, "implausible link arithmetic inputs");
  return pixel_rate * activity * bits_per_event;
}

}  // namespace evatt
