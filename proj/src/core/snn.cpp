#include "core/snn.hpp"

#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace evatt {

namespace {
constexpr double kHalfPi = 1.5707963267948966;
}

double surrogate_forward(double x, double alpha) {
  return std::atan(kHalfPi * alpha * x) / (2.0 * kHalfPi) + 0.5;
}

double surrogate_grad(double x, double alpha) {
  const double s = kHalfPi * alpha * x;
  return (alpha / 2.0) / (1.0 + s * s);
}

void init_kaiming_uniform(Parameter& p, std::uint64_t seed) {
  std::int64_t fan_in = 1;
  for (int i = 1; i < p.value.ndim(); ++i) fan_in *= p.value.dim(i);
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : p.value.data) v = dist(rng);
  p.grad.zero();
}

Adam::Adam(std::vector<Parameter*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (auto* p : params_) {
    if (!p) fail(ErrorKind::Invalid, "null parameter handed to optimizer");
    m_.emplace_back(p->value.shape);
    v_.emplace_back(p->value.shape);
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    for (std::int64_t j = 0; j < p.value.numel(); ++j) {
      const double g = p.grad.data[j];
      m_[i].data[j] = cfg_.beta1 * m_[i].data[j] + (1.0 - cfg_.beta1) * g;
      v_[i].data[j] = cfg_.beta2 * v_[i].data[j] + (1.0 - cfg_.beta2) * g * g;
      const double mh = m_[i].data[j] / bc1;
      const double vh = v_[i].data[j] / bc2;
      p.value.data[j] -= cfg_.lr * mh / (std::sqrt(vh) + cfg_.eps);
    }
  }
}

void Adam::zero_grad() {
  for (auto* p : params_) p->zero_grad();
}

void Adam::check_finite(const std::string& context) const {
  for (const auto* p : params_) {
    for (std::int64_t j = 0; j < p->value.numel(); ++j)
      if (!std::isfinite(p->value.data[j]) || !std::isfinite(p->grad.data[j]))
        fail(ErrorKind::Diverged,
             "non-finite value in parameter '" + p->name + "' during " +
                 context);
  }
}

}  // namespace evatt
