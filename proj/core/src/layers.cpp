#include "photostyle/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <string>

#include "photostyle/errors.hpp"

namespace photostyle::nn {
namespace {

using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// im2col scratch budget in floats; conv2d walks output rows in blocks that fit.
constexpr std::size_t kColumnBudget = std::size_t{1} << 22;

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

std::string layer_prefix(std::string_view layer) {
  return "layer '" + std::string(layer) + "': ";
}

Tensor pad_input(const Tensor& input, int pad, Padding padding) {
  if (pad == 0) return input;
  const int h = input.height();
  const int w = input.width();
  Tensor padded(input.channels(), h + 2 * pad, w + 2 * pad, 0.0f);
  for (int c = 0; c < input.channels(); ++c) {
    for (int y = 0; y < padded.height(); ++y) {
      const int sy = y - pad;
      const bool row_inside = sy >= 0 && sy < h;
      if (padding == Padding::kZero && !row_inside) continue;
      const int ry = row_inside ? sy : reflect_index(sy, h);
      for (int x = 0; x < padded.width(); ++x) {
        const int sx = x - pad;
        const bool col_inside = sx >= 0 && sx < w;
        if (padding == Padding::kZero && !col_inside) continue;
        padded.at(c, y, x) = input.at(c, ry, col_inside ? sx : reflect_index(sx, w));
      }
    }
  }
  return padded;
}

}  // namespace

Tensor conv2d(const Tensor& input, const KernelView& kernel, std::span<const float> bias,
              const ConvGeometry& geometry, std::string_view layer) {
  if (kernel.in_channels != input.channels()) {
    throw ConfigError(layer_prefix(layer) + "kernel expects " +
                      std::to_string(kernel.in_channels) + " input channels, got " +
                      std::to_string(input.channels()));
  }
  if (kernel.filters <= 0 || kernel.kernel_height <= 0 || kernel.kernel_width <= 0) {
    throw ConfigError(layer_prefix(layer) + "empty kernel");
  }
  const std::size_t expected = static_cast<std::size_t>(kernel.filters) * kernel.in_channels *
                               kernel.kernel_height * kernel.kernel_width;
  if (kernel.values.size() != expected) {
    throw ConfigError(layer_prefix(layer) + "kernel has " + std::to_string(kernel.values.size()) +
                      " values, shape needs " + std::to_string(expected));
  }
  if (!bias.empty() && bias.size() != static_cast<std::size_t>(kernel.filters)) {
    throw ConfigError(layer_prefix(layer) + "bias has " + std::to_string(bias.size()) +
                      " values for " + std::to_string(kernel.filters) + " filters");
  }
  if (geometry.stride < 1 || geometry.pad < 0) {
    throw ConfigError(layer_prefix(layer) + "stride must be >= 1 and pad >= 0");
  }

  const Tensor padded = pad_input(input, geometry.pad, geometry.padding);
  const int kh = kernel.kernel_height;
  const int kw = kernel.kernel_width;
  const int stride = geometry.stride;
  if (padded.height() < kh || padded.width() < kw) {
    throw ConfigError(layer_prefix(layer) + "input smaller than kernel");
  }
  const int out_h = (padded.height() - kh) / stride + 1;
  const int out_w = (padded.width() - kw) / stride + 1;
  Tensor output(kernel.filters, out_h, out_w, 0.0f);

  const int depth = kernel.in_channels * kh * kw;
  const Eigen::Map<const RowMatrixF> weights(kernel.values.data(), kernel.filters, depth);
  const std::size_t row_cost = static_cast<std::size_t>(depth) * static_cast<std::size_t>(out_w);
  const int block_rows =
      std::clamp(static_cast<int>(kColumnBudget / std::max<std::size_t>(row_cost, 1)), 1, out_h);
  std::vector<float> columns(static_cast<std::size_t>(depth) * block_rows * out_w);
  const std::size_t out_plane = output.plane_size();

  for (int y0 = 0; y0 < out_h; y0 += block_rows) {
    const int rows = std::min(block_rows, out_h - y0);
    const int cols = rows * out_w;
    for (int c = 0; c < kernel.in_channels; ++c) {
      for (int ky = 0; ky < kh; ++ky) {
        for (int kx = 0; kx < kw; ++kx) {
          float* dst = columns.data() + static_cast<std::size_t>((c * kh + ky) * kw + kx) * cols;
          for (int r = 0; r < rows; ++r) {
            const int sy = (y0 + r) * stride + ky;
            for (int x = 0; x < out_w; ++x) {
              *dst++ = padded.at(c, sy, x * stride + kx);
            }
          }
        }
      }
    }
    const Eigen::Map<const RowMatrixF> col(columns.data(), depth, cols);
    Eigen::Map<RowMatrixF, 0, Eigen::OuterStride<>> out(
        output.values().data() + static_cast<std::size_t>(y0) * out_w, kernel.filters, cols,
        Eigen::OuterStride<>(static_cast<Eigen::Index>(out_plane)));
    out.noalias() = weights * col;
  }

  if (!bias.empty()) {
    for (int f = 0; f < kernel.filters; ++f) {
      for (float& v : output.channel(f)) v += bias[f];
    }
  }
  return output;
}

void relu_inplace(Tensor& tensor) noexcept {
  for (float& v : tensor.values()) v = std::max(v, 0.0f);
}

Tensor relu(Tensor input) {
  relu_inplace(input);
  return input;
}

bool PoolMask::valid() const noexcept {
  if (argmax.size() != static_cast<std::size_t>(channels) * out_height * out_width) return false;
  if (out_height != (in_height + 1) / 2 || out_width != (in_width + 1) / 2) return false;
  return std::all_of(argmax.begin(), argmax.end(), [](std::uint8_t a) { return a < 4; });
}

PoolResult maxpool2d(const Tensor& input, std::string layer_id) {
  const int h = input.height();
  const int w = input.width();
  const int out_h = (h + 1) / 2;
  const int out_w = (w + 1) / 2;
  PoolResult result{Tensor(input.channels(), out_h, out_w, 0.0f), PoolMask{}};
  PoolMask& mask = result.mask;
  mask.layer_id = std::move(layer_id);
  mask.channels = input.channels();
  mask.in_height = h;
  mask.in_width = w;
  mask.out_height = out_h;
  mask.out_width = out_w;
  mask.argmax.resize(static_cast<std::size_t>(input.channels()) * out_h * out_w);

  std::size_t k = 0;
  for (int c = 0; c < input.channels(); ++c) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox, ++k) {
        float best = 0.0f;
        std::uint8_t best_pos = 0;
        for (std::uint8_t pos = 0; pos < 4; ++pos) {
          // Positions past the edge replicate the last row/column.
          const int y = std::min(2 * oy + pos / 2, h - 1);
          const int x = std::min(2 * ox + pos % 2, w - 1);
          const float v = input.at(c, y, x);
          if (pos == 0 || v > best) {
            best = v;
            best_pos = pos;
          }
        }
        result.output.at(c, oy, ox) = best;
        mask.argmax[k] = best_pos;
      }
    }
  }
  return result;
}

Tensor unpool2d(const Tensor& input, const PoolMask& mask) {
  if (!mask.valid()) {
    throw ConfigError("unpool from '" + mask.layer_id + "': malformed pooling mask");
  }
  if (input.channels() != mask.channels || input.height() != mask.out_height ||
      input.width() != mask.out_width) {
    throw ConfigError("unpool from '" + mask.layer_id + "': input is " +
                      std::to_string(input.channels()) + "x" + std::to_string(input.height()) +
                      "x" + std::to_string(input.width()) + " but mask expects " +
                      std::to_string(mask.channels) + "x" + std::to_string(mask.out_height) + "x" +
                      std::to_string(mask.out_width));
  }
  Tensor output(mask.channels, mask.in_height, mask.in_width, 0.0f);
  std::size_t k = 0;
  for (int c = 0; c < mask.channels; ++c) {
    for (int oy = 0; oy < mask.out_height; ++oy) {
      for (int ox = 0; ox < mask.out_width; ++ox, ++k) {
        const int y = 2 * oy + mask.argmax[k] / 2;
        const int x = 2 * ox + mask.argmax[k] % 2;
        // Argmax on a replicated edge sample lands outside the crop and is dropped.
        if (y < mask.in_height && x < mask.in_width) {
          output.at(c, y, x) = input.at(c, oy, ox);
        }
      }
    }
  }
  return output;
}

}  // namespace photostyle::nn
