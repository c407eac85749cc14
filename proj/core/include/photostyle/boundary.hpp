#pragma once

#include <vector>

#include "photostyle/tensor.hpp"

namespace photostyle {

struct BoundaryScore {
  double f_measure = 0.0;          ///< best F over the sweep, in [0,1]
  double threshold = 0.0;          ///< stylized-gradient threshold achieving it
  double content_threshold = 0.0;  ///< Otsu threshold of the content gradient
  double precision = 0.0;
  double recall = 0.0;
  /// The sweep grid: every distinct positive stylized gradient value, descending.
  std::vector<double> thresholds;
};

/// ITU-R 601 luma of a 3-channel image, as an H*W row-major plane.
std::vector<double> luminance(const nn::Tensor& image);

/// Sobel gradient magnitude with replicated borders.
std::vector<double> sobel_magnitude(const std::vector<double>& plane, int height, int width);

/// Otsu's threshold over a 256-bin histogram of [0, max]. Values strictly above it are foreground.
/// Returns 0 for an all-zero input.
double otsu_threshold(const std::vector<double>& values);

/// Content edges are Otsu-binarised; stylized edges are swept over every threshold t where
/// the prediction is {g >= t}. F = 2 TP / (|predicted| + |content edges|).
/// A content image without edges scores 1 against an edgeless stylization and 0 otherwise.
BoundaryScore boundary_score(const nn::Tensor& stylized, const nn::Tensor& content);

}  // namespace photostyle
