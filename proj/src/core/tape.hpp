#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace evatt {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape) {}

  void zero_grad() { grad.zero(); }
};

// Hard spikes with surrogate gradients, or a smooth forward whose backward is
// its exact derivative. The relaxed mode exists so finite differences can
// validate the backward pass end to end.
enum class SnnMode { spiking, relaxed };

struct SpikeRecorder {
  virtual ~SpikeRecorder() = default;
  virtual void on_spikes(const std::string& label, std::int64_t count) = 0;
};

using VarId = int;

// Define-by-run reverse-mode tape. Parameters are not tape variables; their
// gradients accumulate straight into Parameter::grad so a weight reused at
// every timestep sums its contributions naturally.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  VarId input(Tensor v);

  VarId conv2d(VarId x, Parameter& w, Parameter* bias, int stride, int pad);
  VarId deconv2d(VarId x, Parameter& w, Parameter* bias, int stride, int pad);

  // u = in + tau * u_prev * (1 - y_prev). Spiking mode treats the reset gate
  // as a constant in backward (straight-through); relaxed mode keeps its
  // derivative.
  VarId lif_update(VarId in, VarId u_prev, VarId y_prev, double tau,
                   SnnMode mode);
  VarId spike(VarId u, double v_th, double alpha, SnnMode mode,
              const std::string& label = {});

  VarId relu(VarId x);
  VarId add(VarId a, VarId b);
  VarId scale(VarId x, double k);
  VarId sigmoid(VarId x);
  VarId softmax_channels(VarId logits);  // over dim 1 of [N,C,H,W]
  VarId global_avg_pool(VarId x);        // [N,C,H,W] -> [N,C]
  VarId linear(VarId x, Parameter& w, Parameter* bias);  // [N,C]x[O,C]->[N,O]

  // Mean over (n,h,w) of -log(probs[n,class,h,w]) with the log argument
  // clamped to >= 1e-12. classes is row-major [N,H,W] with values 0..C-1.
  VarId nll(VarId probs, const std::vector<std::uint8_t>& classes);
  VarId mse(VarId pred, const Tensor& target);

  void backward(VarId loss);

  const Tensor& value(VarId id) const { return nodes_[id].value; }
  const Tensor& grad(VarId id) const { return nodes_[id].grad; }
  std::size_t node_count() const { return nodes_.size(); }

  void set_spike_recorder(SpikeRecorder* rec) { recorder_ = rec; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void()> back;
  };

  VarId push(Tensor value, std::function<void()> back = nullptr);
  Tensor& grad_ref(VarId id) { return nodes_[id].grad; }
  void check_id(VarId id) const;

  std::vector<Node> nodes_;
  SpikeRecorder* recorder_ = nullptr;
  bool backward_done_ = false;
};

}  // namespace evatt
