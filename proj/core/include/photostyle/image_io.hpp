#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "photostyle/tensor.hpp"

namespace photostyle::io {

/// 8-bit interleaved pixels as stored in the file; `channels` is 1 (gray) or 3 (RGB).
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
};

/// PNG (8-bit gray/RGB/palette, alpha dropped) or binary/ASCII PPM/PGM with maxval <= 255.
/// The format is detected from the file content. 16-bit data is rejected with IoError.
RawImage read_raw_image(const std::filesystem::path& path);

/// RGB in [0,1] as a 3 x H x W tensor; grayscale is replicated to three channels.
nn::Tensor load_image(const std::filesystem::path& path);

/// Clamps to [0,1] and quantises to 8 bits. `.ppm`/`.pnm` writes binary PPM, anything else PNG.
void write_image(const nn::Tensor& image, const std::filesystem::path& path);

nn::Tensor to_tensor(const RawImage& raw);

/// Separable triangle-filter resampling; the kernel widens when shrinking so downscaling
/// averages instead of aliasing.
nn::Tensor resize(const nn::Tensor& image, int height, int width);

}  // namespace photostyle::io
