#pragma once

#include "photostyle/tensor.hpp"

namespace photostyle::smoothing {

struct GuidedFilterParams {
  int radius = 0;  ///< window is (2 radius + 1)^2; 0 means "derive from image size"
  double epsilon = 1e-2;
};

/// radius = max(1, round(max(height, width) / 30)), epsilon = 1e-2.
GuidedFilterParams default_guided_params(int height, int width);

/// Mean over the (2r+1)^2 window clipped to the image, per channel.
nn::Tensor box_mean(const nn::Tensor& input, int radius);

/// Guided image filter with a 3-channel guide, applied to every channel of `input`.
///
/// Per window k: a_k = (Sigma_k + eps Id)^-1 cov_k(I, p), b_k = mean_k(p) - a_k . mean_k(I);
/// the output at i averages a_k . I_i + b_k over the windows containing i. Windows are
/// clipped at the image border.
nn::Tensor guided_filter(const nn::Tensor& input, const nn::Tensor& guide,
                         const GuidedFilterParams& params);

}  // namespace photostyle::smoothing
