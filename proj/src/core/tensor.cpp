#include "core/tensor.hpp"

#include <Eigen/Dense>
#include <sstream>

#include "core/error.hpp"

namespace evatt {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

std::int64_t count_elems(const std::vector<int>& s) {
  std::int64_t n = 1;
  for (int d : s) {
    if (d <= 0) fail(ErrorKind::Dimension, "tensor dims must be positive");
    n *= d;
  }
  return n;
}

void check_map4(const Tensor& t, const char* what) {
  if (t.ndim() != 4)
    fail(ErrorKind::Dimension, std::string(what) + " must be 4-d");
}

// cols[(ci*k+kh)*k+kw, ho*wo_n+wo] = x[ci, ho*s-p+kh, wo*s-p+kw], 0 outside.
void im2col(const double* x, int c, int h, int w, int k, int stride, int pad,
            int oh, int ow, double* cols) {
  for (int ci = 0; ci < c; ++ci) {
    const double* plane = x + static_cast<std::int64_t>(ci) * h * w;
    for (int kh = 0; kh < k; ++kh) {
      for (int kw = 0; kw < k; ++kw) {
        double* row =
            cols + (static_cast<std::int64_t>(ci) * k * k + kh * k + kw) * oh *
                       ow;
        for (int ho = 0; ho < oh; ++ho) {
          int iy = ho * stride - pad + kh;
          if (iy < 0 || iy >= h) {
            for (int wo = 0; wo < ow; ++wo) row[ho * ow + wo] = 0.0;
            continue;
          }
          for (int wo = 0; wo < ow; ++wo) {
            int ix = wo * stride - pad + kw;
            row[ho * ow + wo] =
                (ix >= 0 && ix < w) ? plane[iy * w + ix] : 0.0;
          }
        }
      }
    }
  }
}

// Scatter-add of the column matrix back onto the image grid; the adjoint of
// im2col, also used directly as the transposed-conv forward.
void col2im_add(const double* cols, int c, int h, int w, int k, int stride,
                int pad, int oh, int ow, double* x) {
  for (int ci = 0; ci < c; ++ci) {
    double* plane = x + static_cast<std::int64_t>(ci) * h * w;
    for (int kh = 0; kh < k; ++kh) {
      for (int kw = 0; kw < k; ++kw) {
        const double* row =
            cols + (static_cast<std::int64_t>(ci) * k * k + kh * k + kw) * oh *
                       ow;
        for (int ho = 0; ho < oh; ++ho) {
          int iy = ho * stride - pad + kh;
          if (iy < 0 || iy >= h) continue;
          for (int wo = 0; wo < ow; ++wo) {
            int ix = wo * stride - pad + kw;
            if (ix >= 0 && ix < w) plane[iy * w + ix] += row[ho * ow + wo];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)) {
  data.assign(static_cast<std::size_t>(count_elems(shape)), 0.0);
}

Tensor Tensor::scalar(double v) {
  Tensor t({1});
  t.data[0] = v;
  return t;
}

Tensor Tensor::full(std::vector<int> s, double v) {
  Tensor t(std::move(s));
  t.fill(v);
  return t;
}

void Tensor::fill(double v) { std::fill(data.begin(), data.end(), v); }

std::string shape_string(const Tensor& t) {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < t.ndim(); ++i) os << (i ? "," : "") << t.shape[i];
  os << ']';
  return os.str();
}

int conv_out_extent(int in, int k, int stride, int pad) {
  int out = (in + 2 * pad - k) / stride + 1;
  if (out <= 0) fail(ErrorKind::Dimension, "conv output extent <= 0");
  return out;
}

int deconv_out_extent(int in, int k, int stride, int pad) {
  int out = (in - 1) * stride - 2 * pad + k;
  if (out <= 0) fail(ErrorKind::Dimension, "deconv output extent <= 0");
  return out;
}

Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor* bias,
                      int stride, int pad) {
  check_map4(x, "conv input");
  check_map4(w, "conv weight");
  const int n = x.dim(0), ci = x.dim(1), h = x.dim(2), ww = x.dim(3);
  const int co = w.dim(0), k = w.dim(2);
  if (w.dim(1) != ci) fail(ErrorKind::Dimension, "conv channel mismatch");
  if (w.dim(3) != k) fail(ErrorKind::Dimension, "conv kernel must be square");
  const int oh = conv_out_extent(h, k, stride, pad);
  const int ow = conv_out_extent(ww, k, stride, pad);

  Tensor y({n, co, oh, ow});
  std::vector<double> cols(static_cast<std::size_t>(ci) * k * k * oh * ow);
  ConstMatMap wm(w.ptr(), co, ci * k * k);
  for (int s = 0; s < n; ++s) {
    im2col(x.ptr() + static_cast<std::int64_t>(s) * ci * h * ww, ci, h, ww, k,
           stride, pad, oh, ow, cols.data());
    ConstMatMap cm(cols.data(), ci * k * k, oh * ow);
    MatMap ym(y.ptr() + static_cast<std::int64_t>(s) * co * oh * ow, co,
              oh * ow);
    ym.noalias() = wm * cm;
  }
  if (bias) {
    if (bias->numel() != co) fail(ErrorKind::Dimension, "conv bias mismatch");
    for (int s = 0; s < n; ++s)
      for (int c = 0; c < co; ++c) {
        double* p = y.ptr() + (static_cast<std::int64_t>(s) * co + c) * oh * ow;
        const double b = bias->data[static_cast<std::size_t>(c)];
        for (int i = 0; i < oh * ow; ++i) p[i] += b;
      }
  }
  return y;
}

Tensor conv2d_input_grad(const Tensor& gy, const Tensor& w, int stride,
                         int pad, int in_h, int in_w) {
  check_map4(gy, "conv output grad");
  check_map4(w, "conv weight");
  const int n = gy.dim(0), co = gy.dim(1), oh = gy.dim(2), ow = gy.dim(3);
  const int ci = w.dim(1), k = w.dim(2);
  if (w.dim(0) != co) fail(ErrorKind::Dimension, "conv grad channel mismatch");

  Tensor gx({n, ci, in_h, in_w});
  std::vector<double> cols(static_cast<std::size_t>(ci) * k * k * oh * ow);
  ConstMatMap wm(w.ptr(), co, ci * k * k);
  for (int s = 0; s < n; ++s) {
    ConstMatMap gym(gy.ptr() + static_cast<std::int64_t>(s) * co * oh * ow, co,
                    oh * ow);
    MatMap cm(cols.data(), ci * k * k, oh * ow);
    cm.noalias() = wm.transpose() * gym;
    col2im_add(cols.data(), ci, in_h, in_w, k, stride, pad, oh, ow,
               gx.ptr() + static_cast<std::int64_t>(s) * ci * in_h * in_w);
  }
  return gx;
}

void conv2d_weight_grad(const Tensor& x, const Tensor& gy, int stride, int pad,
                        Tensor& gw_accum, Tensor* gbias_accum) {
  check_map4(x, "conv input");
  check_map4(gy, "conv output grad");
  const int n = x.dim(0), ci = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int co = gy.dim(1), oh = gy.dim(2), ow = gy.dim(3);
  const int k = gw_accum.dim(2);
  if (gw_accum.dim(0) != co || gw_accum.dim(1) != ci)
    fail(ErrorKind::Dimension, "conv weight grad shape mismatch");

  std::vector<double> cols(static_cast<std::size_t>(ci) * k * k * oh * ow);
  MatMap gwm(gw_accum.ptr(), co, ci * k * k);
  for (int s = 0; s < n; ++s) {
    im2col(x.ptr() + static_cast<std::int64_t>(s) * ci * h * w, ci, h, w, k,
           stride, pad, oh, ow, cols.data());
    ConstMatMap cm(cols.data(), ci * k * k, oh * ow);
    ConstMatMap gym(gy.ptr() + static_cast<std::int64_t>(s) * co * oh * ow, co,
                    oh * ow);
    gwm.noalias() += gym * cm.transpose();
  }
  if (gbias_accum) {
    for (int s = 0; s < n; ++s)
      for (int c = 0; c < co; ++c) {
        const double* p =
            gy.ptr() + (static_cast<std::int64_t>(s) * co + c) * oh * ow;
        double sum = 0.0;
        for (int i = 0; i < oh * ow; ++i) sum += p[i];
        gbias_accum->data[static_cast<std::size_t>(c)] += sum;
      }
  }
}

Tensor deconv2d_forward(const Tensor& x, const Tensor& w, const Tensor* bias,
                        int stride, int pad) {
  check_map4(x, "deconv input");
  check_map4(w, "deconv weight");
  const int n = x.dim(0), ci = x.dim(1), h = x.dim(2), ww = x.dim(3);
  const int co = w.dim(1), k = w.dim(2);
  if (w.dim(0) != ci) fail(ErrorKind::Dimension, "deconv channel mismatch");
  const int oh = deconv_out_extent(h, k, stride, pad);
  const int ow = deconv_out_extent(ww, k, stride, pad);

  Tensor y({n, co, oh, ow});
  std::vector<double> cols(static_cast<std::size_t>(co) * k * k * h * ww);
  ConstMatMap wm(w.ptr(), ci, co * k * k);
  for (int s = 0; s < n; ++s) {
    ConstMatMap xm(x.ptr() + static_cast<std::int64_t>(s) * ci * h * ww, ci,
                   h * ww);
    MatMap cm(cols.data(), co * k * k, h * ww);
    cm.noalias() = wm.transpose() * xm;
    col2im_add(cols.data(), co, oh, ow, k, stride, pad, h, ww,
               y.ptr() + static_cast<std::int64_t>(s) * co * oh * ow);
  }
  if (bias) {
    if (bias->numel() != co) fail(ErrorKind::Dimension, "deconv bias mismatch");
    for (int s = 0; s < n; ++s)
      for (int c = 0; c < co; ++c) {
        double* p = y.ptr() + (static_cast<std::int64_t>(s) * co + c) * oh * ow;
        const double b = bias->data[static_cast<std::size_t>(c)];
        for (int i = 0; i < oh * ow; ++i) p[i] += b;
      }
  }
  return y;
}

Tensor deconv2d_input_grad(const Tensor& gy, const Tensor& w, int stride,
                           int pad) {
  // The adjoint of the scatter is an ordinary convolution of gy with w read
  // as a [Ci, Co, k, k] conv weight.
  return conv2d_forward(gy, w, nullptr, stride, pad);
}

void deconv2d_weight_grad(const Tensor& x, const Tensor& gy, int stride,
                          int pad, Tensor& gw_accum, Tensor* gbias_accum) {
  check_map4(x, "deconv input");
  check_map4(gy, "deconv output grad");
  const int n = x.dim(0), ci = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int co = gy.dim(1), goh = gy.dim(2), gow = gy.dim(3);
  const int k = gw_accum.dim(2);
  if (gw_accum.dim(0) != ci || gw_accum.dim(1) != co)
    fail(ErrorKind::Dimension, "deconv weight grad shape mismatch");

  std::vector<double> cols(static_cast<std::size_t>(co) * k * k * h * w);
  MatMap gwm(gw_accum.ptr(), ci, co * k * k);
  for (int s = 0; s < n; ++s) {
    im2col(gy.ptr() + static_cast<std::int64_t>(s) * co * goh * gow, co, goh,
           gow, k, stride, pad, h, w, cols.data());
    ConstMatMap cm(cols.data(), co * k * k, h * w);
    ConstMatMap xm(x.ptr() + static_cast<std::int64_t>(s) * ci * h * w, ci,
                   h * w);
    gwm.noalias() += xm * cm.transpose();
  }
  if (gbias_accum) {
    for (int s = 0; s < n; ++s)
      for (int c = 0; c < co; ++c) {
        const double* p =
            gy.ptr() + (static_cast<std::int64_t>(s) * co + c) * goh * gow;
        double sum = 0.0;
        for (int i = 0; i < goh * gow; ++i) sum += p[i];
        gbias_accum->data[static_cast<std::size_t>(c)] += sum;
      }
  }
}

}  // namespace evatt
