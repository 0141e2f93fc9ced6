#pragma once

#include "core/event.hpp"

namespace evatt {

struct SimilarityScore {
  enum class Kind { Mss, Esim, EsimN };
  double value = 0.0;
  Kind kind = Kind::Esim;
  int window = 0;  // polarization window for EsimN, else 0
};

constexpr double kDefaultPolarizeThreshold = 0.2501;

// Frame polarized through the polarity-intensity rule; remembers the window
// size and threshold that produced it.
struct PolarizedFrame {
  EventFrame frame;
  int window = 0;
  double threshold = 0.0;
};

// Ratio of common visual events over the union of events: cells with equal
// nonzero value / cells nonzero in either frame. Both frames empty -> 1.
SimilarityScore esim(const EventFrame& f1, const EventFrame& f2);
SimilarityScore esim(const PolarizedFrame& f1, const PolarizedFrame& f2);

// 1 - mean squared cell difference, cells read as {-1,0,+1}.
SimilarityScore mss(const EventFrame& f1, const EventFrame& f2);

// (positive - negative event count) / (h*w) over the h x w window centered
// at (x, y); cells outside the frame count as zero. Even extents put the
// extra row/column below/right of the center.
double polarity_intensity(const EventFrame& f, int x, int y, int h, int w);

// Per-pixel polarization: +1 where PI > th, -1 where PI < -th, else 0.
PolarizedFrame polarize(const EventFrame& f, int n,
                        double th = kDefaultPolarizeThreshold);

// Esim over frames polarized with an n x n window ("Esim<n>").
SimilarityScore region_esim(const EventFrame& f1, const EventFrame& f2, int n,
                            double th = kDefaultPolarizeThreshold);

// Prediction-quality ratio between noisy-input and clean-input runs.
double relative_esim(double esim_noisy, double esim_clean);

// Spearman rank correlation with average ranks on ties. Needs >= 2 points
// and nonzero variance on both sides.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

double mean_absolute_error(const std::vector<double>& pred,
                           const std::vector<double>& truth);

}  // namespace evatt
