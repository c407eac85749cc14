#include "photostyle/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "photostyle/errors.hpp"

namespace photostyle::nn {

Tensor::Tensor(int channels, int height, int width, float fill)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 0 || height < 0 || width < 0) {
    throw ConfigError("negative tensor dimension");
  }
  values_.assign(static_cast<std::size_t>(channels) * plane_size(), fill);
}

Tensor::Tensor(int channels, int height, int width, std::vector<float> values)
    : channels_(channels), height_(height), width_(width), values_(std::move(values)) {
  if (channels < 0 || height < 0 || width < 0) {
    throw ConfigError("negative tensor dimension");
  }
  if (values_.size() != static_cast<std::size_t>(channels) * plane_size()) {
    throw ConfigError("tensor payload has " + std::to_string(values_.size()) +
                      " values, shape needs " +
                      std::to_string(static_cast<std::size_t>(channels) * plane_size()));
  }
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](float v) { return std::isfinite(v); });
}

}  // namespace photostyle::nn
