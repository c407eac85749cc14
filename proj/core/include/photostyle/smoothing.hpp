#pragma once

#include <Eigen/Core>

#include "photostyle/affinity.hpp"
#include "photostyle/guided_filter.hpp"
#include "photostyle/tensor.hpp"

namespace photostyle::smoothing {

inline constexpr double kDefaultLambda = 1e-4;

/// The closed-form smoothing system (I - alpha S) R = (1 - alpha) Y.
struct SmoothingProblem {
  Eigen::MatrixXd y;  ///< N x channels, one column per colour channel
  SparseMatrix s;     ///< D^-1/2 W D^-1/2
  double alpha = 0.0; ///< 1 / (1 + lambda)
};

/// S_ij = w_ij / sqrt(d_i d_j). Throws NumericError if any degree is not positive.
SparseMatrix normalized_operator(const SparseAffinity& affinity);

double alpha_from_lambda(double lambda);

/// Flattens a C x H x W tensor to N x C.
Eigen::MatrixXd to_pixel_matrix(const nn::Tensor& image);
nn::Tensor from_pixel_matrix(const Eigen::MatrixXd& m, int height, int width);

/// Builds the problem for smoothing `y` over `affinity` (which must cover y's pixels).
SmoothingProblem make_problem(const nn::Tensor& y, const SparseAffinity& affinity, double lambda);

enum class LinearSolver { kSparseLU, kConjugateGradient };

struct SolveOptions {
  LinearSolver solver = LinearSolver::kSparseLU;
  double cg_tolerance = 1e-10;  ///< relative residual in the 2-norm, per channel
  int cg_max_iterations = 0;    ///< 0: 10 N
  double residual_tolerance = 1e-8;
};

/// ||(I - alpha S) R - (1 - alpha) Y||_inf / ||Y||_inf (0 when Y is zero).
double relative_residual(const SmoothingProblem& problem, const Eigen::MatrixXd& r);

/// R* = (1 - alpha)(I - alpha S)^-1 Y, all channels sharing one factorisation.
///
/// The result is refined until relative_residual <= residual_tolerance. Throws NumericError
/// when the factorisation is singular or the tolerance cannot be met.
Eigen::MatrixXd solve_exact(const SmoothingProblem& problem, const SolveOptions& options = {});

enum class SmoothingMode { kExact, kApprox };
enum class AffinityKind { kMatting, kGaussian };

struct SmoothingConfig {
  SmoothingMode mode = SmoothingMode::kExact;
  double lambda = kDefaultLambda;
  AffinityKind affinity = AffinityKind::kMatting;
  double sigma = 0.1;
  double matting_epsilon = kDefaultMattingEpsilon;
  NegativeWeights negatives = NegativeWeights::kKeep;
  SolveOptions solve{};
  GuidedFilterParams guided{};  ///< radius 0: default_guided_params
  /// Edge-replicated margin added around both images before the exact solve and cropped
  /// afterwards, so every real pixel has a full neighbourhood. 0 disables it.
  int border = 2;
};

/// Exact mode: builds the content affinity and solves the closed form. Approx mode: guided
/// filter of `y` with `content` as guide. Output is clamped to [0,1].
nn::Tensor smooth(const nn::Tensor& y, const nn::Tensor& content, const SmoothingConfig& config = {});

/// The exact path without clamping or padding. Exposed for tests and benchmarks.
nn::Tensor smooth_exact_unclamped(const nn::Tensor& y, const nn::Tensor& content,
                                  const SmoothingConfig& config);

/// Copies `image` with an edge-replicated margin of `border` pixels on every side.
nn::Tensor pad_replicate(const nn::Tensor& image, int border);
nn::Tensor crop(const nn::Tensor& image, int border);

}  // namespace photostyle::smoothing
