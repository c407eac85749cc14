#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace photostyle::nn {

/// Dense float array in channels x height x width order.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int channels, int height, int width, float fill = 0.0f);
  Tensor(int channels, int height, int width, std::vector<float> values);

  int channels() const noexcept { return channels_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<float> values() noexcept { return values_; }
  std::span<const float> values() const noexcept { return values_; }

  std::span<float> channel(int c) noexcept {
    return std::span<float>(values_).subspan(static_cast<std::size_t>(c) * plane_size(), plane_size());
  }
  std::span<const float> channel(int c) const noexcept {
    return std::span<const float>(values_).subspan(static_cast<std::size_t>(c) * plane_size(),
                                                   plane_size());
  }

  float& at(int c, int y, int x) noexcept { return values_[index(c, y, x)]; }
  float at(int c, int y, int x) const noexcept { return values_[index(c, y, x)]; }

  bool same_shape(const Tensor& other) const noexcept {
    return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
  }
  bool all_finite() const noexcept;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t index(int c, int y, int x) const noexcept {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) +
            static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<float> values_;
};

}  // namespace photostyle::nn
