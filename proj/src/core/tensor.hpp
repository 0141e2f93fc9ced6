#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace evatt {

// Dense row-major tensor of doubles. Feature maps are [N, C, H, W], conv
// weights [Co, Ci, k, k], transposed-conv weights [Ci, Co, k, k].
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s);

  static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
  static Tensor scalar(double v);
  static Tensor full(std::vector<int> s, double v);

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
  int dim(int i) const { return shape[i]; }
  int ndim() const { return static_cast<int>(shape.size()); }
  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  double* ptr() { return data.data(); }
  const double* ptr() const { return data.data(); }

  void fill(double v);
  void zero() { fill(0.0); }
};

std::string shape_string(const Tensor& t);

// y[n,co,ho,wo] = sum_{ci,kh,kw} w[co,ci,kh,kw] * x[n,ci,ho*s-p+kh,wo*s-p+kw]
Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor* bias,
                      int stride, int pad);
Tensor conv2d_input_grad(const Tensor& gy, const Tensor& w, int stride,
                         int pad, int in_h, int in_w);
void conv2d_weight_grad(const Tensor& x, const Tensor& gy, int stride, int pad,
                        Tensor& gw_accum, Tensor* gbias_accum);

// Transposed convolution; out spatial size = (in-1)*stride - 2*pad + k.
Tensor deconv2d_forward(const Tensor& x, const Tensor& w, const Tensor* bias,
                        int stride, int pad);
Tensor deconv2d_input_grad(const Tensor& gy, const Tensor& w, int stride,
                           int pad);
void deconv2d_weight_grad(const Tensor& x, const Tensor& gy, int stride,
                          int pad, Tensor& gw_accum, Tensor* gbias_accum);

int conv_out_extent(int in, int k, int stride, int pad);
int deconv_out_extent(int in, int k, int stride, int pad);

}  // namespace evatt
