#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "photostyle/tensor.hpp"

namespace photostyle::nn {

enum class Padding { kReflect, kZero };

/// Read-only view of a convolution kernel stored filters x in_channels x kh x kw.
struct KernelView {
  int filters = 0;
  int in_channels = 0;
  int kernel_height = 0;
  int kernel_width = 0;
  std::span<const float> values;
};

struct ConvGeometry {
  int stride = 1;
  int pad = 0;
  Padding padding = Padding::kZero;
};

/// Cross-correlation with bias. Output size per axis is floor((in + 2 pad - k) / stride) + 1.
///
/// Reflect padding mirrors without repeating the edge sample (a b c -> b | a b c | b). On an
/// axis of length one there is nothing to mirror and the edge is replicated instead.
/// Throws ConfigError naming `layer` on any shape mismatch.
Tensor conv2d(const Tensor& input, const KernelView& kernel, std::span<const float> bias,
              const ConvGeometry& geometry, std::string_view layer = "conv2d");

Tensor relu(Tensor input);
void relu_inplace(Tensor& tensor) noexcept;

/// Argmax record of one 2x2/stride-2 pooling layer.
///
/// `argmax` holds, per (channel, output pixel), the row-major position 0..3 inside the
/// window. Odd inputs are edge-replicated on the right/bottom before pooling; `in_height`
/// and `in_width` keep the unpadded size so unpooling can crop back to it.
struct PoolMask {
  std::string layer_id;
  int channels = 0;
  int in_height = 0;
  int in_width = 0;
  int out_height = 0;
  int out_width = 0;
  std::vector<std::uint8_t> argmax;

  bool valid() const noexcept;
};

struct PoolResult {
  Tensor output;
  PoolMask mask;
};

/// 2x2 max pooling with stride 2. Ties resolve to the first position in row-major order.
PoolResult maxpool2d(const Tensor& input, std::string layer_id = {});

/// Writes each input value to the position recorded in `mask`; every other output is zero.
Tensor unpool2d(const Tensor& input, const PoolMask& mask);

}  // namespace photostyle::nn
