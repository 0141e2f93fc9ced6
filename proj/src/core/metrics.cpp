#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace evatt {

namespace {

void require_same_geometry(const EventFrame& f1, const EventFrame& f2) {
  if (!(f1.geom == f2.geom))
    fail(ErrorKind::Dimension,
         "frame geometries differ: " + std::to_string(f1.geom.width) + "x" +
             std::to_string(f1.geom.height) + " vs " +
             std::to_string(f2.geom.width) + "x" +
             std::to_string(f2.geom.height));
}

}  // namespace

SimilarityScore esim(const EventFrame& f1, const EventFrame& f2) {
  require_same_geometry(f1, f2);
  long long common = 0, total = 0;
  for (std::size_t i = 0; i < f1.cells.size(); ++i) {
    const int a = f1.cells[i], b = f2.cells[i];
    common += (a != 0 && a == b);
    total += (a != 0 || b != 0);
  }
  double value = total == 0 ? 1.0 : static_cast<double>(common) / total;
  return {value, SimilarityScore::Kind::Esim, 0};
}

SimilarityScore esim(const PolarizedFrame& f1, const PolarizedFrame& f2) {
  SimilarityScore s = esim(f1.frame, f2.frame);
  s.kind = SimilarityScore::Kind::EsimN;
  s.window = f1.window;
  return s;
}

SimilarityScore mss(const EventFrame& f1, const EventFrame& f2) {
  require_same_geometry(f1, f2);
  long long sq = 0;
  for (std::size_t i = 0; i < f1.cells.size(); ++i) {
    const int d = f1.cells[i] - f2.cells[i];
    sq += d * d;
  }
  double mse = static_cast<double>(sq) / f1.geom.cells();
  if (mse > 1.0)
    fail(ErrorKind::Range,
         "mean squared difference " + std::to_string(mse) + " exceeds 1");
  return {1.0 - mse, SimilarityScore::Kind::Mss, 0};
}

double polarity_intensity(const EventFrame& f, int x, int y, int h, int w) {
  if (!f.geom.contains(x, y))
    fail(ErrorKind::Geometry, "pixel outside frame");
  if (h < 1 || w < 1) fail(ErrorKind::Range, "window extents must be >= 1");

  const int y0 = y - (h - 1) / 2;
  const int x0 = x - (w - 1) / 2;
  int pos = 0, neg = 0;
  for (int yy = y0; yy < y0 + h; ++yy) {
    if (yy < 0 || yy >= f.geom.height) continue;
    for (int xx = x0; xx < x0 + w; ++xx) {
      if (xx < 0 || xx >= f.geom.width) continue;
      const int c = f.at(xx, yy);
      pos += (c > 0);
      neg += (c < 0);
    }
  }
  return static_cast<double>(pos - neg) / (h * w);
}

PolarizedFrame polarize(const EventFrame& f, int n, double th) {
  if (n < 1) fail(ErrorKind::Range, "polarization window must be >= 1");
  if (th <= 0) fail(ErrorKind::Range, "polarization threshold must be > 0");

  const int W = f.geom.width, H = f.geom.height;
  // Summed-area table of signed cells; window sums then come in O(1).
  std::vector<int> sat(static_cast<std::size_t>(W + 1) * (H + 1), 0);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      sat[(y + 1) * (W + 1) + (x + 1)] = f.at(x, y) +
                                         sat[y * (W + 1) + (x + 1)] +
                                         sat[(y + 1) * (W + 1) + x] -
                                         sat[y * (W + 1) + x];
  auto window_net = [&](int x0, int y0, int x1, int y1) {
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, W);
    y1 = std::min(y1, H);
    if (x0 >= x1 || y0 >= y1) return 0;
    return sat[y1 * (W + 1) + x1] - sat[y0 * (W + 1) + x1] -
           sat[y1 * (W + 1) + x0] + sat[y0 * (W + 1) + x0];
  };

  PolarizedFrame out;
  out.frame = EventFrame(f.geom, f.frame_index);
  out.window = n;
  out.threshold = th;
  const double area = static_cast<double>(n) * n;
  const int off = (n - 1) / 2;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const double pi = window_net(x - off, y - off, x - off + n, y - off + n) / area;
      out.frame.at(x, y) = pi > th ? 1 : (pi < -th ? -1 : 0);
    }
  }
  return out;
}

SimilarityScore region_esim(const EventFrame& f1, const EventFrame& f2, int n,
                            double th) {
  require_same_geometry(f1, f2);
  return esim(polarize(f1, n, th), polarize(f2, n, th));
}

double relative_esim(double esim_noisy, double esim_clean) {
  if (esim_clean <= 0)
    fail(ErrorKind::Range, "clean-input score must be positive");
  return esim_noisy / esim_clean;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    fail(ErrorKind::Dimension, "rank correlation needs equal-length series");
  if (a.size() < 2)
    fail(ErrorKind::Range, "rank correlation needs at least 2 points");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0)
    fail(ErrorKind::Range, "rank correlation undefined for constant series");
  return cov / std::sqrt(va * vb);
}

double mean_absolute_error(const std::vector<double>& pred,
                           const std::vector<double>& truth) {
  if (pred.size() != truth.size() || pred.empty())
    fail(ErrorKind::Dimension, "mean absolute error needs matching series");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    sum += std::abs(pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

}  // namespace evatt
