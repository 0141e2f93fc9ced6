#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/tape.hpp"

namespace evatt {

struct LifParams {
  double tau = 0.5;
  double v_th = 1.0;
  double alpha = 2.0;
};

// Shifted arctan squashed to (0,1): f(x) = atan(pi/2 * alpha * x)/pi + 1/2.
double surrogate_forward(double x, double alpha);
// f'(x) = (alpha/2) / (1 + (pi/2 * alpha * x)^2); equals 1 at x=0, alpha=2.
double surrogate_grad(double x, double alpha);

// Counts hard spikes per labelled layer during a tape forward pass.
struct SpikeCounter final : SpikeRecorder {
  std::map<std::string, std::int64_t> per_layer;
  std::int64_t total = 0;

  void on_spikes(const std::string& label, std::int64_t count) override {
    per_layer[label] += count;
    total += count;
  }
  void reset() {
    per_layer.clear();
    total = 0;
  }
};

// Kaiming-uniform fill over the parameter's fan-in (dims after the first).
void init_kaiming_uniform(Parameter& p, std::uint64_t seed);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamConfig cfg);

  void step();
  void zero_grad();
  // Rejects non-finite values anywhere in gradients or weights so a blown-up
  // run fails loudly with the offending parameter named.
  void check_finite(const std::string& context) const;

  const AdamConfig& config() const { return cfg_; }
  const std::vector<Parameter*>& params() const { return params_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Tensor> m_, v_;
  AdamConfig cfg_;
  std::int64_t t_ = 0;
};

}  // namespace evatt
