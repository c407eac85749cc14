#include "photostyle/guided_filter.hpp"

#include <Eigen/Core>
#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "photostyle/errors.hpp"

namespace photostyle::smoothing {
namespace {

// Clipped-window means of a single double plane using a summed-area table.
class BoxMeans {
 public:
  BoxMeans(int height, int width, int radius)
      : h_(height), w_(width), r_(radius), table_(static_cast<std::size_t>(height + 1) * (width + 1)) {}

  std::vector<double> operator()(const std::vector<double>& plane) {
    const std::size_t stride = static_cast<std::size_t>(w_) + 1;
    std::fill(table_.begin(), table_.begin() + static_cast<long>(stride), 0.0);
    for (int y = 0; y < h_; ++y) {
      double row = 0.0;
      table_[(static_cast<std::size_t>(y) + 1) * stride] = 0.0;
      for (int x = 0; x < w_; ++x) {
        row += plane[static_cast<std::size_t>(y) * w_ + x];
        table_[(static_cast<std::size_t>(y) + 1) * stride + x + 1] =
            table_[static_cast<std::size_t>(y) * stride + x + 1] + row;
      }
    }
    std::vector<double> out(plane.size());
    for (int y = 0; y < h_; ++y) {
      const int y0 = std::max(0, y - r_);
      const int y1 = std::min(h_ - 1, y + r_);
      for (int x = 0; x < w_; ++x) {
        const int x0 = std::max(0, x - r_);
        const int x1 = std::min(w_ - 1, x + r_);
        const double sum = table_[(static_cast<std::size_t>(y1) + 1) * stride + x1 + 1] -
                           table_[static_cast<std::size_t>(y0) * stride + x1 + 1] -
                           table_[(static_cast<std::size_t>(y1) + 1) * stride + x0] +
                           table_[static_cast<std::size_t>(y0) * stride + x0];
        out[static_cast<std::size_t>(y) * w_ + x] = sum / ((y1 - y0 + 1) * (x1 - x0 + 1));
      }
    }
    return out;
  }

 private:
  int h_, w_, r_;
  std::vector<double> table_;
};

std::vector<double> plane_of(const nn::Tensor& t, int c) {
  auto src = t.channel(c);
  return std::vector<double>(src.begin(), src.end());
}

}  // namespace

GuidedFilterParams default_guided_params(int height, int width) {
  GuidedFilterParams p;
  p.radius = std::max(1, static_cast<int>(std::lround(std::max(height, width) / 30.0)));
  p.epsilon = 1e-2;
  return p;
}

nn::Tensor box_mean(const nn::Tensor& input, int radius) {
  if (radius < 0) throw ConfigError("box filter radius must be >= 0");
  BoxMeans box(input.height(), input.width(), radius);
  nn::Tensor out(input.channels(), input.height(), input.width());
  for (int c = 0; c < input.channels(); ++c) {
    const auto m = box(plane_of(input, c));
    std::copy(m.begin(), m.end(), out.channel(c).begin());
  }
  return out;
}

nn::Tensor guided_filter(const nn::Tensor& input, const nn::Tensor& guide,
                         const GuidedFilterParams& params) {
  if (guide.channels() != 3) throw ConfigError("guided filter: guide must have 3 channels");
  if (input.height() != guide.height() || input.width() != guide.width()) {
    throw ConfigError("guided filter: input and guide sizes differ");
  }
  if (params.radius < 1) throw ConfigError("guided filter: radius must be >= 1");
  if (!(params.epsilon > 0.0)) throw ConfigError("guided filter: epsilon must be positive");

  const int h = guide.height();
  const int w = guide.width();
  const std::size_t n = static_cast<std::size_t>(h) * w;
  BoxMeans box(h, w, params.radius);

  std::array<std::vector<double>, 3> g;
  std::array<std::vector<double>, 3> mean_g;
  for (int c = 0; c < 3; ++c) {
    g[c] = plane_of(guide, c);
    mean_g[c] = box(g[c]);
  }
  // Guide covariance, upper triangle: rr rg rb gg gb bb.
  std::array<std::vector<double>, 6> var;
  {
    int k = 0;
    std::vector<double> prod(n);
    for (int a = 0; a < 3; ++a) {
      for (int b = a; b < 3; ++b, ++k) {
        for (std::size_t i = 0; i < n; ++i) prod[i] = g[a][i] * g[b][i];
        var[k] = box(prod);
        for (std::size_t i = 0; i < n; ++i) var[k][i] -= mean_g[a][i] * mean_g[b][i];
      }
    }
  }
  // (Sigma + eps Id)^-1 per pixel, shared by every input channel.
  std::vector<Eigen::Matrix3d> inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Matrix3d s;
    s << var[0][i], var[1][i], var[2][i],  //
        var[1][i], var[3][i], var[4][i],   //
        var[2][i], var[4][i], var[5][i];
    s.diagonal().array() += params.epsilon;
    inv[i] = s.inverse();
  }

  nn::Tensor out(input.channels(), h, w);
  std::vector<double> prod(n);
  std::array<std::vector<double>, 3> a;
  for (auto& plane : a) plane.resize(n);
  std::vector<double> b(n);
  for (int c = 0; c < input.channels(); ++c) {
    const std::vector<double> p = plane_of(input, c);
    const std::vector<double> mean_p = box(p);
    std::array<std::vector<double>, 3> cov_gp;
    for (int k = 0; k < 3; ++k) {
      for (std::size_t i = 0; i < n; ++i) prod[i] = g[k][i] * p[i];
      cov_gp[k] = box(prod);
      for (std::size_t i = 0; i < n; ++i) cov_gp[k][i] -= mean_g[k][i] * mean_p[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector3d coef = inv[i] * Eigen::Vector3d(cov_gp[0][i], cov_gp[1][i], cov_gp[2][i]);
      for (int k = 0; k < 3; ++k) a[k][i] = coef(k);
      b[i] = mean_p[i] - coef(0) * mean_g[0][i] - coef(1) * mean_g[1][i] - coef(2) * mean_g[2][i];
    }
    const std::vector<double> mean_b = box(b);
    std::array<std::vector<double>, 3> mean_a;
    for (int k = 0; k < 3; ++k) mean_a[k] = box(a[k]);
    auto dst = out.channel(c);
    for (std::size_t i = 0; i < n; ++i) {
      dst[i] = static_cast<float>(mean_a[0][i] * g[0][i] + mean_a[1][i] * g[1][i] +
                                  mean_a[2][i] * g[2][i] + mean_b[i]);
    }
  }
  return out;
}

}  // namespace photostyle::smoothing
