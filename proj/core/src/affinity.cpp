#include "photostyle/affinity.hpp"

#include <Eigen/LU>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "photostyle/errors.hpp"

namespace photostyle::smoothing {

Eigen::VectorXd row_degrees(const SparseMatrix& weights) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(weights.rows());
  for (Eigen::Index i = 0; i < weights.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(weights, i); it; ++it) d(i) += it.value();
  }
  return d;
}

SparseAffinity gaussian_affinity(const nn::Tensor& image, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian affinity: sigma must be positive");
  const int h = image.height();
  const int w = image.width();
  const Eigen::Index n = static_cast<Eigen::Index>(h) * w;
  const double inv_sigma2 = 1.0 / (sigma * sigma);
  // Ascending column order within a row.
  constexpr std::array<std::array<int, 2>, 8> kNeighbours = {
      {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};

  SparseAffinity out;
  out.weights.resize(n, n);
  out.weights.reserve(Eigen::VectorXi::Constant(n, 8));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Eigen::Index i = static_cast<Eigen::Index>(y) * w + x;
      for (const auto& [dy, dx] : kNeighbours) {
        const int ny = y + dy;
        const int nx = x + dx;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        double dist2 = 0.0;
        for (int c = 0; c < image.channels(); ++c) {
          const double diff = static_cast<double>(image.at(c, y, x)) - image.at(c, ny, nx);
          dist2 += diff * diff;
        }
        out.weights.insert(i, static_cast<Eigen::Index>(ny) * w + nx) = std::exp(-dist2 * inv_sigma2);
      }
    }
  }
  out.weights.makeCompressed();
  out.degree = row_degrees(out.weights);
  return out;
}

SparseAffinity matting_affinity(const nn::Tensor& image, double epsilon, NegativeWeights negatives,
                                int window_radius) {
  if (image.channels() != 3) throw ConfigError("matting affinity needs a 3-channel image");
  if (window_radius < 1) throw ConfigError("matting affinity: window radius must be >= 1");
  if (!(epsilon > 0.0)) throw ConfigError("matting affinity: epsilon must be positive");
  const int r = window_radius;
  const int side = 2 * r + 1;
  const int h = image.height();
  const int w = image.width();
  if (h < side || w < side) {
    throw ConfigError("matting affinity: image " + std::to_string(w) + "x" + std::to_string(h) +
                      " is smaller than the " + std::to_string(side) + "x" +
                      std::to_string(side) + " window");
  }
  const int window_pixels = side * side;
  const int reach = 2 * r;
  const int stencil = 2 * reach + 1;
  const std::size_t slots = static_cast<std::size_t>(stencil) * stencil;
  const std::size_t n = static_cast<std::size_t>(h) * w;

  // Dense stencil accumulator: slot (dy + reach) * stencil + (dx + reach) of pixel i holds
  // w(i, i + (dy, dx)). `covered` marks pairs that share at least one window.
  std::vector<double> acc(n * slots, 0.0);
  std::vector<std::uint8_t> covered(n * slots, 0);

  const double inv_count = 1.0 / window_pixels;
  std::vector<Eigen::Vector3d> colour(static_cast<std::size_t>(window_pixels));
  std::vector<int> wy(static_cast<std::size_t>(window_pixels));
  std::vector<int> wx(static_cast<std::size_t>(window_pixels));

  for (int cy = r; cy < h - r; ++cy) {
    for (int cx = r; cx < w - r; ++cx) {
      Eigen::Vector3d mean = Eigen::Vector3d::Zero();
      Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
      int k = 0;
      for (int y = cy - r; y <= cy + r; ++y) {
        for (int x = cx - r; x <= cx + r; ++x, ++k) {
          Eigen::Vector3d v(image.at(0, y, x), image.at(1, y, x), image.at(2, y, x));
          colour[static_cast<std::size_t>(k)] = v;
          wy[static_cast<std::size_t>(k)] = y;
          wx[static_cast<std::size_t>(k)] = x;
          mean += v;
          second += v * v.transpose();
        }
      }
      mean *= inv_count;
      const Eigen::Matrix3d cov = second * inv_count - mean * mean.transpose();
      const Eigen::Matrix3d inv =
          (cov + (epsilon * inv_count) * Eigen::Matrix3d::Identity()).inverse();
      for (auto& v : colour) v -= mean;

      // Each unordered pair is evaluated once and written to both (i, j) and (j, i) so the
      // matrix is exactly symmetric.
      for (std::size_t a = 0; a < colour.size(); ++a) {
        const Eigen::Vector3d left = inv * colour[a];
        const std::size_t i = static_cast<std::size_t>(wy[a]) * w + static_cast<std::size_t>(wx[a]);
        for (std::size_t b = a; b < colour.size(); ++b) {
          const int dy = wy[b] - wy[a];
          const int dx = wx[b] - wx[a];
          const std::size_t j = static_cast<std::size_t>(wy[b]) * w + static_cast<std::size_t>(wx[b]);
          const double v = (1.0 + left.dot(colour[b])) * inv_count;
          const std::size_t forward = i * slots + static_cast<std::size_t>((dy + reach) * stencil + dx + reach);
          acc[forward] += v;
          covered[forward] = 1;
          if (b != a) {
            const std::size_t backward =
                j * slots + static_cast<std::size_t>((reach - dy) * stencil + reach - dx);
            acc[backward] += v;
            covered[backward] = 1;
          }
        }
      }
    }
  }

  SparseAffinity out;
  const auto nn_index = static_cast<Eigen::Index>(n);
  out.weights.resize(nn_index, nn_index);
  out.weights.reserve(Eigen::VectorXi::Constant(nn_index, static_cast<int>(slots)));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
          const std::size_t slot = i * slots + static_cast<std::size_t>((dy + reach) * stencil + dx + reach);
          if (!covered[slot]) continue;
          double v = acc[slot];
          if (negatives == NegativeWeights::kClampToZero && v < 0.0) v = 0.0;
          out.weights.insert(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(y + dy) * w + (x + dx)) = v;
        }
      }
    }
  }
  out.weights.makeCompressed();
  out.degree = row_degrees(out.weights);
  return out;
}

}  // namespace photostyle::smoothing
