// Deliberately naive reference implementations used to check the library.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "photostyle/tensor.hpp"

namespace oracle {

using photostyle::nn::Tensor;

inline Tensor random_tensor(std::mt19937_64& rng, int c, int h, int w, float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> dist(lo, hi);
  Tensor t(c, h, w);
  for (float& v : t.values()) v = dist(rng);
  return t;
}

inline std::vector<float> random_values(std::mt19937_64& rng, std::size_t n, float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> v(n);
  for (float& x : v) x = dist(rng);
  return v;
}

// Mirror without repeating the edge; a length-one axis just repeats its only sample.
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

inline Tensor conv2d(const Tensor& in, const std::vector<float>& kernel, const std::vector<float>& bias,
                     int filters, int kh, int kw, int stride, int pad, bool reflect) {
  const int oh = (in.height() + 2 * pad - kh) / stride + 1;
  const int ow = (in.width() + 2 * pad - kw) / stride + 1;
  Tensor out(filters, oh, ow);
  for (int f = 0; f < filters; ++f) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double acc = bias[static_cast<std::size_t>(f)];
        for (int c = 0; c < in.channels(); ++c) {
          for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx) {
              int y = oy * stride + ky - pad;
              int x = ox * stride + kx - pad;
              double v = 0.0;
              if (reflect) {
                v = in.at(c, reflect_index(y, in.height()), reflect_index(x, in.width()));
              } else if (y >= 0 && y < in.height() && x >= 0 && x < in.width()) {
                v = in.at(c, y, x);
              }
              acc += v * kernel[((static_cast<std::size_t>(f) * in.channels() + c) * kh + ky) * kw + kx];
            }
          }
        }
        out.at(f, oy, ox) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

struct Pooled {
  Tensor values;
  std::vector<std::uint8_t> argmax;
};

// 2x2 window scan; odd sizes read past the edge as the clamped edge sample.
inline Pooled maxpool(const Tensor& in) {
  const int oh = (in.height() + 1) / 2;
  const int ow = (in.width() + 1) / 2;
  Pooled p{Tensor(in.channels(), oh, ow), {}};
  for (int c = 0; c < in.channels(); ++c) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        float best = 0.0f;
        int pos = -1;
        for (int k = 0; k < 4; ++k) {
          const int sy = std::min(2 * y + k / 2, in.height() - 1);
          const int sx = std::min(2 * x + k % 2, in.width() - 1);
          const float v = in.at(c, sy, sx);
          if (pos < 0 || v > best) {
            best = v;
            pos = k;
          }
        }
        p.values.at(c, y, x) = best;
        p.argmax.push_back(static_cast<std::uint8_t>(pos));
      }
    }
  }
  return p;
}

inline Tensor unpool(const Tensor& in, const std::vector<std::uint8_t>& argmax, int out_h, int out_w) {
  Tensor out(in.channels(), out_h, out_w);
  std::size_t i = 0;
  for (int c = 0; c < in.channels(); ++c) {
    for (int y = 0; y < in.height(); ++y) {
      for (int x = 0; x < in.width(); ++x, ++i) {
        const int ty = 2 * y + argmax[i] / 2;
        const int tx = 2 * x + argmax[i] % 2;
        if (ty < out_h && tx < out_w) out.at(c, ty, tx) = in.at(c, y, x);
      }
    }
  }
  return out;
}

// Cyclic Jacobi eigenvalue iteration. Returns eigenvalues descending with matching columns.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> jacobi_eigen(Eigen::MatrixXd a, int sweeps = 100) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });
  Eigen::VectorXd values(n);
  Eigen::MatrixXd vectors(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return {values, vectors};
}

inline Eigen::Vector3d pixel(const Tensor& img, int y, int x) {
  return {img.at(0, y, x), img.at(1, y, x), img.at(2, y, x)};
}

inline Eigen::MatrixXd dense_gaussian(const Tensor& img, double sigma) {
  const int h = img.height(), w = img.width();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(h * w, h * w);
  for (int i = 0; i < h * w; ++i) {
    for (int j = 0; j < h * w; ++j) {
      const int dy = std::abs(i / w - j / w), dx = std::abs(i % w - j % w);
      if (i == j || dy > 1 || dx > 1) continue;
      const double d2 = (pixel(img, i / w, i % w) - pixel(img, j / w, j % w)).squaredNorm();
      m(i, j) = std::exp(-d2 / (sigma * sigma));
    }
  }
  return m;
}

// Accumulates every 3x3 window's contribution into a dense matrix, one window at a time.
inline Eigen::MatrixXd dense_matting(const Tensor& img, double eps) {
  const int h = img.height(), w = img.width();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(h * w, h * w);
  for (int cy = 1; cy + 1 < h; ++cy) {
    for (int cx = 1; cx + 1 < w; ++cx) {
      std::vector<int> idx;
      Eigen::Matrix<double, 3, 9> pts;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          pts.col(static_cast<Eigen::Index>(idx.size())) = pixel(img, cy + dy, cx + dx);
          idx.push_back((cy + dy) * w + cx + dx);
        }
      const Eigen::Vector3d mu = pts.rowwise().mean();
      const Eigen::Matrix<double, 3, 9> centered = pts.colwise() - mu;
      const Eigen::Matrix3d cov = centered * centered.transpose() / 9.0;
      const Eigen::Matrix3d inv = (cov + (eps / 9.0) * Eigen::Matrix3d::Identity()).inverse();
      for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b)
          m(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]) +=
              (1.0 + centered.col(a).dot(inv * centered.col(b))) / 9.0;
    }
  }
  return m;
}

// (1 - alpha) (I - alpha D^-1/2 W D^-1/2)^-1 Y with dense algebra throughout.
inline Eigen::MatrixXd dense_closed_form(const Eigen::MatrixXd& w, const Eigen::MatrixXd& y, double lambda) {
  const double alpha = 1.0 / (1.0 + lambda);
  const Eigen::VectorXd d = w.rowwise().sum();
  const Eigen::VectorXd inv_sqrt = d.array().sqrt().inverse();
  const Eigen::MatrixXd s = inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(w.rows(), w.cols()) - alpha * s;
  return (1.0 - alpha) * a.fullPivLu().solve(y);
}

// Guided filter by explicit ridge regression in every clipped window:
// min_{a,b} (1/|w|) sum (a.I_i + b - p_i)^2 + eps |a|^2, then average a.I + b over windows.
inline Tensor guided_filter(const Tensor& p, const Tensor& guide, int r, double eps) {
  const int h = guide.height(), w = guide.width();
  Tensor out(p.channels(), h, w);
  for (int c = 0; c < p.channels(); ++c) {
    std::vector<Eigen::Vector4d> coef(static_cast<std::size_t>(h) * w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        Eigen::Matrix4d ata = Eigen::Matrix4d::Zero();
        Eigen::Vector4d atb = Eigen::Vector4d::Zero();
        int count = 0;
        for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy)
          for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
            const Eigen::Vector4d row(guide.at(0, yy, xx), guide.at(1, yy, xx), guide.at(2, yy, xx), 1.0);
            ata += row * row.transpose();
            atb += row * p.at(c, yy, xx);
            ++count;
          }
        ata /= count;
        atb /= count;
        for (int k = 0; k < 3; ++k) ata(k, k) += eps;
        coef[static_cast<std::size_t>(y) * w + x] = ata.ldlt().solve(atb);
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        int count = 0;
        for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy)
          for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
            const Eigen::Vector4d& k = coef[static_cast<std::size_t>(yy) * w + xx];
            acc += k(0) * guide.at(0, y, x) + k(1) * guide.at(1, y, x) + k(2) * guide.at(2, y, x) + k(3);
            ++count;
          }
        out.at(c, y, x) = static_cast<float>(acc / count);
      }
    }
  }
  return out;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double{a.values()[i]} - b.values()[i]));
  return m;
}

}  // namespace oracle
