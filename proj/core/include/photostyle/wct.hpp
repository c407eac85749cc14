#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace photostyle::wct {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// C x N feature matrix with the per-channel mean already removed.
struct FeatureMatrix {
  Matrix values;
  Vector mean;

  Eigen::Index channels() const noexcept { return values.rows(); }
  Eigen::Index pixels() const noexcept { return values.cols(); }
  Matrix uncentered() const { return values.colwise() + mean; }
};

struct EigenDecomposition {
  Vector eigenvalues;  ///< descending
  Matrix eigenvectors; ///< orthonormal columns, same order as eigenvalues
  int rank = 0;        ///< eigenvalues above eig_floor * max(eigenvalue)
};

/// Whitening (content) and coloring (style) matrices for one region at one level.
struct ProjectionPair {
  Matrix whitening;
  Matrix coloring;
  Vector style_mean;
  std::optional<int> label;
};

inline constexpr double kDefaultEigFloor = 1e-8;

/// Removes the per-row mean. Requires at least one column.
FeatureMatrix center(const Matrix& raw);

/// H H^T, unnormalized.
Matrix covariance(const FeatureMatrix& features);

/// Eigenpairs of a symmetric matrix, largest first. Eigenvalues at or below
/// eig_floor times the largest are excluded from `rank`.
///
/// Throws NumericError (mentioning `context`) if the input is not symmetric within 1e-8 or the
/// solver fails to converge.
EigenDecomposition sym_eig(const Matrix& m, double eig_floor = kDefaultEigFloor,
                           std::string_view context = {});

/// E f(Lambda) E^T restricted to the retained eigenpairs.
Matrix spectral_function(const EigenDecomposition& eig, double exponent);

/// Whitening P_C = E_C L_C^{-1/2} E_C^T and coloring P_S = E_S L_S^{1/2} E_S^T.
///
/// Both covariances are taken per pixel (H H^T / N) so that content and style regions with
/// different pixel counts are colored to the same second moment. Throws DegenerateRegionError
/// when either side retains no eigenvalue.
ProjectionPair build_projection_pair(const FeatureMatrix& content, const FeatureMatrix& style,
                                     double eig_floor = kDefaultEigFloor,
                                     std::string_view context = {});

/// blend * (P_S P_C H_C + mean_S) + (1 - blend) * (H_C + mean_C).
Matrix apply_transform(const ProjectionPair& pair, const FeatureMatrix& content, double blend = 1.0);

/// Transfer when no projection can be formed: recentre content on the style mean.
Matrix mean_shift_transform(const FeatureMatrix& content, const Vector& style_mean, double blend);

/// Region-wise transform. `content_labels`/`style_labels` give one label id per feature column.
///
/// A label gets its own projection pair when both sides have at least `channels / 4` pixels of
/// it (and at least two); otherwise its content pixels use the global pair. If even the global
/// pair is degenerate the content is only recentred on the style mean.
Matrix labeled_transform(const Matrix& content_raw, const Matrix& style_raw,
                         std::span<const int> content_labels, std::span<const int> style_labels,
                         double eig_floor = kDefaultEigFloor, double blend = 1.0,
                         std::string_view context = {});

/// Same as labeled_transform with every pixel in a single region.
Matrix global_transform(const Matrix& content_raw, const Matrix& style_raw,
                        double eig_floor = kDefaultEigFloor, double blend = 1.0,
                        std::string_view context = {});

/// Minimum pixels per side for a label to get its own projection pair.
int min_region_pixels(Eigen::Index channels) noexcept;

}  // namespace photostyle::wct
