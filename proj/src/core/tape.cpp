#include "core/tape.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/snn.hpp"

namespace evatt {

namespace {
using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
constexpr double kLogClamp = 1e-12;
}  // namespace

VarId Tape::push(Tensor value, std::function<void()> back) {
  nodes_.push_back(Node{std::move(value), Tensor{}, std::move(back)});
  return static_cast<VarId>(nodes_.size() - 1);
}

void Tape::check_id(VarId id) const {
  if (id < 0 || id >= static_cast<VarId>(nodes_.size()))
    fail(ErrorKind::Invalid, "tape variable out of range");
}

VarId Tape::input(Tensor v) { return push(std::move(v)); }

VarId Tape::conv2d(VarId x, Parameter& w, Parameter* bias, int stride,
                   int pad) {
  check_id(x);
  Tensor y = conv2d_forward(nodes_[x].value, w.value, bias ? &bias->value : nullptr,
                            stride, pad);
  const int in_h = nodes_[x].value.dim(2), in_w = nodes_[x].value.dim(3);
  VarId out = push(std::move(y));
  nodes_[out].back = [this, x, out, &w, bias, stride, pad, in_h, in_w] {
    const Tensor& gy = nodes_[out].grad;
    conv2d_weight_grad(nodes_[x].value, gy, stride, pad, w.grad,
                       bias ? &bias->grad : nullptr);
    Tensor gx = conv2d_input_grad(gy, w.value, stride, pad, in_h, in_w);
    Tensor& acc = grad_ref(x);
    for (std::int64_t i = 0; i < gx.numel(); ++i) acc.data[i] += gx.data[i];
  };
  return out;
}

VarId Tape::deconv2d(VarId x, Parameter& w, Parameter* bias, int stride,
                     int pad) {
  check_id(x);
  Tensor y = deconv2d_forward(nodes_[x].value, w.value,
                              bias ? &bias->value : nullptr, stride, pad);
  VarId out = push(std::move(y));
  nodes_[out].back = [this, x, out, &w, bias, stride, pad] {
    const Tensor& gy = nodes_[out].grad;
    deconv2d_weight_grad(nodes_[x].value, gy, stride, pad, w.grad,
                         bias ? &bias->grad : nullptr);
    Tensor gx = deconv2d_input_grad(gy, w.value, stride, pad);
    Tensor& acc = grad_ref(x);
    for (std::int64_t i = 0; i < gx.numel(); ++i) acc.data[i] += gx.data[i];
  };
  return out;
}

VarId Tape::lif_update(VarId in, VarId u_prev, VarId y_prev, double tau,
                       SnnMode mode) {
  check_id(in);
  check_id(u_prev);
  check_id(y_prev);
  const Tensor& cin = nodes_[in].value;
  const Tensor& cu = nodes_[u_prev].value;
  const Tensor& cy = nodes_[y_prev].value;
  if (!cin.same_shape(cu) || !cin.same_shape(cy))
    fail(ErrorKind::Dimension, "lif_update operand shape mismatch");
  Tensor u(cin.shape);
  for (std::int64_t i = 0; i < u.numel(); ++i)
    u.data[i] = cin.data[i] + tau * cu.data[i] * (1.0 - cy.data[i]);
  VarId out = push(std::move(u));
  nodes_[out].back = [this, in, u_prev, y_prev, out, tau, mode] {
    const Tensor& g = nodes_[out].grad;
    Tensor& gin = grad_ref(in);
    Tensor& gu = grad_ref(u_prev);
    const Tensor& cy = nodes_[y_prev].value;
    for (std::int64_t i = 0; i < g.numel(); ++i) {
      gin.data[i] += g.data[i];
      gu.data[i] += g.data[i] * tau * (1.0 - cy.data[i]);
    }
    if (mode == SnnMode::relaxed) {
      Tensor& gy = grad_ref(y_prev);
      const Tensor& cu = nodes_[u_prev].value;
      for (std::int64_t i = 0; i < g.numel(); ++i)
        gy.data[i] += g.data[i] * (-tau) * cu.data[i];
    }
  };
  return out;
}

VarId Tape::spike(VarId u, double v_th, double alpha, SnnMode mode,
                  const std::string& label) {
  check_id(u);
  const Tensor& cu = nodes_[u].value;
  Tensor y(cu.shape);
  std::int64_t fired = 0;
  if (mode == SnnMode::spiking) {
    for (std::int64_t i = 0; i < y.numel(); ++i) {
      y.data[i] = cu.data[i] > v_th ? 1.0 : 0.0;
      fired += y.data[i] > 0.5;
    }
    if (recorder_) recorder_->on_spikes(label, fired);
  } else {
    for (std::int64_t i = 0; i < y.numel(); ++i)
      y.data[i] = surrogate_forward(cu.data[i] - v_th, alpha);
  }
  VarId out = push(std::move(y));
  nodes_[out].back = [this, u, out, v_th, alpha] {
    const Tensor& g = nodes_[out].grad;
    const Tensor& cu = nodes_[u].value;
    Tensor& gu = grad_ref(u);
    for (std::int64_t i = 0; i < g.numel(); ++i)
      gu.data[i] += g.data[i] * surrogate_grad(cu.data[i] - v_th, alpha);
  };
  return out;
}

VarId Tape::relu(VarId x) {
  check_id(x);
  const Tensor& cx = nodes_[x].value;
  Tensor y(cx.shape);
  for (std::int64_t i = 0; i < y.numel(); ++i)
    y.data[i] = cx.data[i] > 0.0 ? cx.data[i] : 0.0;
  VarId out = push(std::move(y));
  nodes_[out].back = [this, x, out] {
    const Tensor& g = nodes_[out].grad;
    const Tensor& cx = nodes_[x].value;
    Tensor& gx = grad_ref(x);
    for (std::int64_t i = 0; i < g.numel(); ++i)
      if (cx.data[i] > 0.0) gx.data[i] += g.data[i];
  };
  return out;
}

VarId Tape::add(VarId a, VarId b) {
  check_id(a);
  check_id(b);
  const Tensor& ca = nodes_[a].value;
  const Tensor& cb = nodes_[b].value;
  if (!ca.same_shape(cb)) fail(ErrorKind::Dimension, "add shape mismatch");
  Tensor y(ca.shape);
  for (std::int64_t i = 0; i < y.numel(); ++i)
    y.data[i] = ca.data[i] + cb.data[i];
  VarId out = push(std::move(y));
  nodes_[out].back = [this, a, b, out] {
    const Tensor& g = nodes_[out].grad;
    Tensor& ga = grad_ref(a);
    Tensor& gb = grad_ref(b);
    for (std::int64_t i = 0; i < g.numel(); ++i) {
      ga.data[i] += g.data[i];
      gb.data[i] += g.data[i];
    }
  };
  return out;
}

VarId Tape::scale(VarId x, double k) {
  check_id(x);
  const Tensor& cx = nodes_[x].value;
  Tensor y(cx.shape);
  for (std::int64_t i = 0; i < y.numel(); ++i) y.data[i] = cx.data[i] * k;
  VarId out = push(std::move(y));
  nodes_[out].back = [this, x, out, k] {
    const Tensor& g = nodes_[out].grad;
    Tensor& gx = grad_ref(x);
    for (std::int64_t i = 0; i < g.numel(); ++i) gx.data[i] += g.data[i] * k;
  };
  return out;
}

VarId Tape::sigmoid(VarId x) {
  check_id(x);
  const Tensor& cx = nodes_[x].value;
  Tensor y(cx.shape);
  for (std::int64_t i = 0; i < y.numel(); ++i)
    y.data[i] = 1.0 / (1.0 + std::exp(-cx.data[i]));
  VarId out = push(std::move(y));
  nodes_[out].back = [this, x, out] {
    const Tensor& g = nodes_[out].grad;
    const Tensor& cy = nodes_[out].value;
    Tensor& gx = grad_ref(x);
    for (std::int64_t i = 0; i < g.numel(); ++i)
      gx.data[i] += g.data[i] * cy.data[i] * (1.0 - cy.data[i]);
  };
  return out;
}

VarId Tape::softmax_channels(VarId logits) {
  check_id(logits);
  const Tensor& cx = nodes_[logits].value;
  if (cx.ndim() != 4) fail(ErrorKind::Dimension, "softmax expects 4-d input");
  const int n = cx.dim(0), c = cx.dim(1), h = cx.dim(2), w = cx.dim(3);
  const std::int64_t hw = static_cast<std::int64_t>(h) * w;
  Tensor y(cx.shape);
  for (int s = 0; s < n; ++s) {
    const double* xs = cx.ptr() + static_cast<std::int64_t>(s) * c * hw;
    double* ys = y.ptr() + static_cast<std::int64_t>(s) * c * hw;
    for (std::int64_t i = 0; i < hw; ++i) {
      double m = xs[i];
      for (int ch = 1; ch < c; ++ch) m = std::max(m, xs[ch * hw + i]);
      double z = 0.0;
      for (int ch = 0; ch < c; ++ch) {
        double e = std::exp(xs[ch * hw + i] - m);
        ys[ch * hw + i] = e;
        z += e;
      }
      for (int ch = 0; ch < c; ++ch) ys[ch * hw + i] /= z;
    }
  }
  VarId out = push(std::move(y));
  nodes_[out].back = [this, logits, out, n, c, hw] {
    const Tensor& g = nodes_[out].grad;
    const Tensor& p = nodes_[out].value;
    Tensor& gx = grad_ref(logits);
    for (int s = 0; s < n; ++s) {
      const std::int64_t base = static_cast<std::int64_t>(s) * c * hw;
      for (std::int64_t i = 0; i < hw; ++i) {
        double dot = 0.0;
        for (int ch = 0; ch < c; ++ch)
          dot += g.data[base + ch * hw + i] * p.data[base + ch * hw + i];
        for (int ch = 0; ch < c; ++ch)
          gx.data[base + ch * hw + i] +=
              p.data[base + ch * hw + i] * (g.data[base + ch * hw + i] - dot);
      }
    }
  };
  return out;
}

VarId Tape::global_avg_pool(VarId x) {
  check_id(x);
  const Tensor& cx = nodes_[x].value;
  if (cx.ndim() != 4) fail(ErrorKind::Dimension, "gap expects 4-d input");
  const int n = cx.dim(0), c = cx.dim(1);
  const std::int64_t hw = static_cast<std::int64_t>(cx.dim(2)) * cx.dim(3);
  Tensor y({n, c});
  for (int s = 0; s < n; ++s)
    for (int ch = 0; ch < c; ++ch) {
      const double* p = cx.ptr() + (static_cast<std::int64_t>(s) * c + ch) * hw;
      double sum = 0.0;
      for (std::int64_t i = 0; i < hw; ++i) sum += p[i];
      y.data[static_cast<std::int64_t>(s) * c + ch] =
          sum / static_cast<double>(hw);
    }
  VarId out = push(std::move(y));
  nodes_[out].back = [this, x, out, n, c, hw] {
    const Tensor& g = nodes_[out].grad;
    Tensor& gx = grad_ref(x);
    const double inv = 1.0 / static_cast<double>(hw);
    for (int s = 0; s < n; ++s)
      for (int ch = 0; ch < c; ++ch) {
        const double gv = g.data[static_cast<std::int64_t>(s) * c + ch] * inv;
        double* p = gx.ptr() + (static_cast<std::int64_t>(s) * c + ch) * hw;
        for (std::int64_t i = 0; i < hw; ++i) p[i] += gv;
      }
  };
  return out;
}

VarId Tape::linear(VarId x, Parameter& w, Parameter* bias) {
  check_id(x);
  const Tensor& cx = nodes_[x].value;
  if (cx.ndim() != 2 || w.value.ndim() != 2)
    fail(ErrorKind::Dimension, "linear expects 2-d input and weight");
  const int n = cx.dim(0), c = cx.dim(1), o = w.value.dim(0);
  if (w.value.dim(1) != c) fail(ErrorKind::Dimension, "linear width mismatch");
  Tensor y({n, o});
  {
    ConstMatMap xm(cx.ptr(), n, c);
    ConstMatMap wm(w.value.ptr(), o, c);
    MatMap ym(y.ptr(), n, o);
    ym.noalias() = xm * wm.transpose();
  }
  if (bias) {
    if (bias->value.numel() != o)
      fail(ErrorKind::Dimension, "linear bias mismatch");
    for (int s = 0; s < n; ++s)
      for (int j = 0; j < o; ++j) y.data[s * o + j] += bias->value.data[j];
  }
  VarId out = push(std::move(y));
  nodes_[out].back = [this, x, out, &w, bias, n, c, o] {
    const Tensor& g = nodes_[out].grad;
    ConstMatMap gm(g.ptr(), n, o);
    ConstMatMap xm(nodes_[x].value.ptr(), n, c);
    ConstMatMap wm(w.value.ptr(), o, c);
    MatMap gwm(w.grad.ptr(), o, c);
    gwm.noalias() += gm.transpose() * xm;
    Tensor& gx = grad_ref(x);
    MatMap gxm(gx.ptr(), n, c);
    gxm.noalias() += gm * wm;
    if (bias)
      for (int s = 0; s < n; ++s)
        for (int j = 0; j < o; ++j) bias->grad.data[j] += g.data[s * o + j];
  };
  return out;
}

VarId Tape::nll(VarId probs, const std::vector<std::uint8_t>& classes) {
  check_id(probs);
  const Tensor& cp = nodes_[probs].value;
  if (cp.ndim() != 4) fail(ErrorKind::Dimension, "nll expects 4-d probs");
  const int n = cp.dim(0), c = cp.dim(1);
  const std::int64_t hw = static_cast<std::int64_t>(cp.dim(2)) * cp.dim(3);
  const std::int64_t count = static_cast<std::int64_t>(n) * hw;
  if (static_cast<std::int64_t>(classes.size()) != count)
    fail(ErrorKind::Dimension, "nll class count mismatch");
  double loss = 0.0;
  for (int s = 0; s < n; ++s) {
    const std::int64_t base = static_cast<std::int64_t>(s) * c * hw;
    for (std::int64_t i = 0; i < hw; ++i) {
      const int cls = classes[static_cast<std::size_t>(s * hw + i)];
      if (cls < 0 || cls >= c) fail(ErrorKind::Range, "nll class out of range");
      loss -= std::log(std::max(cp.data[base + cls * hw + i], kLogClamp));
    }
  }
  loss /= static_cast<double>(count);
  VarId out = push(Tensor::scalar(loss));
  nodes_[out].back = [this, probs, out, cls_copy = classes, n, c, hw, count] {
    const double gy = nodes_[out].grad.data[0];
    const Tensor& cp = nodes_[probs].value;
    Tensor& gp = grad_ref(probs);
    const double inv = gy / static_cast<double>(count);
    for (int s = 0; s < n; ++s) {
      const std::int64_t base = static_cast<std::int64_t>(s) * c * hw;
      for (std::int64_t i = 0; i < hw; ++i) {
        const int cls = cls_copy[static_cast<std::size_t>(s * hw + i)];
        const double p = std::max(cp.data[base + cls * hw + i], kLogClamp);
        gp.data[base + cls * hw + i] -= inv / p;
      }
    }
  };
  return out;
}

VarId Tape::mse(VarId pred, const Tensor& target) {
  check_id(pred);
  const Tensor& cp = nodes_[pred].value;
  if (!cp.same_shape(target))
    fail(ErrorKind::Dimension, "mse shape mismatch");
  double loss = 0.0;
  for (std::int64_t i = 0; i < cp.numel(); ++i) {
    const double d = cp.data[i] - target.data[i];
    loss += d * d;
  }
  loss /= static_cast<double>(cp.numel());
  VarId out = push(Tensor::scalar(loss));
  Tensor tgt = target;
  nodes_[out].back = [this, pred, out, tgt = std::move(tgt)] {
    const double gy = nodes_[out].grad.data[0];
    const Tensor& cp = nodes_[pred].value;
    Tensor& gp = grad_ref(pred);
    const double k = 2.0 * gy / static_cast<double>(cp.numel());
    for (std::int64_t i = 0; i < cp.numel(); ++i)
      gp.data[i] += k * (cp.data[i] - tgt.data[i]);
  };
  return out;
}

void Tape::backward(VarId loss) {
  check_id(loss);
  if (backward_done_) fail(ErrorKind::Invalid, "tape backward ran twice");
  if (nodes_[loss].value.numel() != 1)
    fail(ErrorKind::Invalid, "backward seed must be scalar");
  backward_done_ = true;
  for (auto& node : nodes_) node.grad = Tensor(node.value.shape);
  nodes_[loss].grad.data[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
    if (it->back) it->back();
}

}  // namespace evatt
