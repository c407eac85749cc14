#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "photostyle/tensor.hpp"

namespace photostyle::smoothing {

/// Row-major compressed sparse matrix over pixels (index y * width + x).
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Symmetric pixel affinity W and its degrees d_i = sum_j w_ij.
struct SparseAffinity {
  SparseMatrix weights;
  Eigen::VectorXd degree;

  Eigen::Index size() const noexcept { return weights.rows(); }
};

enum class NegativeWeights { kKeep, kClampToZero };

inline constexpr double kDefaultMattingEpsilon = 1e-5;

/// w_ij = exp(-|I_i - I_j|^2 / sigma^2) between 8-connected neighbours. No self loops.
SparseAffinity gaussian_affinity(const nn::Tensor& image, double sigma);

/// Closed-form matting affinity over (2r+1)^2 windows lying fully inside the image:
///
///   w_ij = sum_{k : i,j in w_k} (1 + (I_i - mu_k)^T (Sigma_k + eps/|w_k| Id)^-1 (I_j - mu_k)) / |w_k|
///
/// Includes i == j. Entries exist for every pair sharing at least one window, so the
/// footprint is (4r+1)^2. Every window adds exactly 1 to the degree of each of its pixels,
/// so d_i is the number of windows covering i. Requires a 3-channel image of at least
/// (2r+1) x (2r+1).
SparseAffinity matting_affinity(const nn::Tensor& image, double epsilon = kDefaultMattingEpsilon,
                                NegativeWeights negatives = NegativeWeights::kKeep,
                                int window_radius = 1);

/// Row sums of `weights`.
Eigen::VectorXd row_degrees(const SparseMatrix& weights);

}  // namespace photostyle::smoothing
