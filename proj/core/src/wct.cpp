#include "photostyle/wct.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "photostyle/errors.hpp"

namespace photostyle::wct {
namespace {

std::string where(std::string_view context) {
  return context.empty() ? std::string() : " [" + std::string(context) + "]";
}

Matrix gather_columns(const Matrix& m, const std::vector<Eigen::Index>& cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(cols[i]);
  return out;
}

// A spread this small relative to the features' magnitude is centring round-off, not signal.
bool below_noise(const EigenDecomposition& eig, const FeatureMatrix& f) {
  const double scale = std::max(1.0, f.mean.cwiseAbs().maxCoeff());
  const double noise = 1e-12 * scale;
  return eig.eigenvalues.size() == 0 || eig.eigenvalues(0) <= noise * noise;
}

}  // namespace

FeatureMatrix center(const Matrix& raw) {
  if (raw.cols() < 1) throw ConfigError("center: feature matrix has no pixels");
  FeatureMatrix f;
  f.mean = raw.rowwise().mean();
  f.values = raw.colwise() - f.mean;
  return f;
}

Matrix covariance(const FeatureMatrix& features) {
  Matrix cov = Matrix::Zero(features.channels(), features.channels());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(features.values);
  return cov.selfadjointView<Eigen::Lower>();
}

EigenDecomposition sym_eig(const Matrix& m, double eig_floor, std::string_view context) {
  if (m.rows() != m.cols()) throw NumericError("sym_eig: matrix is not square" + where(context));
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw NumericError("sym_eig: matrix is not symmetric" + where(context));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NumericError("sym_eig: eigensolver did not converge" + where(context));
  }
  const Eigen::Index n = m.rows();
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  const double largest = n > 0 ? out.eigenvalues(0) : 0.0;
  const double cut = eig_floor * largest;
  out.rank = 0;
  if (largest > 0.0) {
    while (out.rank < n && out.eigenvalues(out.rank) > cut) ++out.rank;
  }
  return out;
}

Matrix spectral_function(const EigenDecomposition& eig, double exponent) {
  const Eigen::Index r = eig.rank;
  const auto basis = eig.eigenvectors.leftCols(r);
  const Vector scaled = eig.eigenvalues.head(r).array().pow(exponent).matrix();
  return basis * scaled.asDiagonal() * basis.transpose();
}

ProjectionPair build_projection_pair(const FeatureMatrix& content, const FeatureMatrix& style,
                                     double eig_floor, std::string_view context) {
  if (content.channels() != style.channels()) {
    throw ConfigError("projection pair: content has " + std::to_string(content.channels()) +
                      " channels, style has " + std::to_string(style.channels()) + where(context));
  }
  const Matrix content_cov = covariance(content) / static_cast<double>(content.pixels());
  const Matrix style_cov = covariance(style) / static_cast<double>(style.pixels());
  const EigenDecomposition ce = sym_eig(content_cov, eig_floor, context);
  const EigenDecomposition se = sym_eig(style_cov, eig_floor, context);
  const bool content_flat = ce.rank == 0 || below_noise(ce, content);
  if (content_flat || se.rank == 0 || below_noise(se, style)) {
    throw DegenerateRegionError(std::string("projection pair: ") + (content_flat ? "content" : "style") +
                                " features have rank 0" + where(context));
  }
  ProjectionPair pair;
  pair.whitening = spectral_function(ce, -0.5);
  pair.coloring = spectral_function(se, 0.5);
  pair.style_mean = style.mean;
  return pair;
}

Matrix apply_transform(const ProjectionPair& pair, const FeatureMatrix& content, double blend) {
  if (pair.whitening.cols() != content.channels()) {
    throw ConfigError("apply_transform: projection is " + std::to_string(pair.whitening.cols()) +
                      " wide, features have " + std::to_string(content.channels()) + " channels");
  }
  // One C x C product up front keeps the per-pixel work to a single GEMM.
  const Matrix projection = pair.coloring * pair.whitening;
  Matrix out(content.values.rows(), content.values.cols());
  out.noalias() = projection * content.values;
  out.colwise() += pair.style_mean;
  if (blend != 1.0) {
    out *= blend;
    out.noalias() += (1.0 - blend) * content.values;
    out.colwise() += (1.0 - blend) * content.mean;
  }
  return out;
}

Matrix mean_shift_transform(const FeatureMatrix& content, const Vector& style_mean, double blend) {
  Matrix out = content.values.colwise() + style_mean;
  if (blend != 1.0) out = blend * out + (1.0 - blend) * content.uncentered();
  return out;
}

int min_region_pixels(Eigen::Index channels) noexcept {
  return std::max<int>(2, static_cast<int>((channels + 3) / 4));
}

Matrix global_transform(const Matrix& content_raw, const Matrix& style_raw, double eig_floor,
                        double blend, std::string_view context) {
  const FeatureMatrix content = center(content_raw);
  const FeatureMatrix style = center(style_raw);
  try {
    return apply_transform(build_projection_pair(content, style, eig_floor, context), content, blend);
  } catch (const DegenerateRegionError&) {
    return mean_shift_transform(content, style.mean, blend);
  }
}

Matrix labeled_transform(const Matrix& content_raw, const Matrix& style_raw,
                         std::span<const int> content_labels, std::span<const int> style_labels,
                         double eig_floor, double blend, std::string_view context) {
  if (static_cast<Eigen::Index>(content_labels.size()) != content_raw.cols() ||
      static_cast<Eigen::Index>(style_labels.size()) != style_raw.cols()) {
    throw ConfigError("labeled_transform: label count does not match feature columns" +
                      where(context));
  }
  std::map<int, std::vector<Eigen::Index>> content_regions, style_regions;
  for (std::size_t i = 0; i < content_labels.size(); ++i) {
    content_regions[content_labels[i]].push_back(static_cast<Eigen::Index>(i));
  }
  for (std::size_t i = 0; i < style_labels.size(); ++i) {
    style_regions[style_labels[i]].push_back(static_cast<Eigen::Index>(i));
  }
  if (content_regions.size() <= 1) {
    return global_transform(content_raw, style_raw, eig_floor, blend, context);
  }

  const Eigen::Index min_pixels = min_region_pixels(content_raw.rows());
  Matrix out(content_raw.rows(), content_raw.cols());
  std::vector<Eigen::Index> fallback;

  for (const auto& [label, cols] : content_regions) {
    auto style_it = style_regions.find(label);
    const bool usable = style_it != style_regions.end() &&
                        static_cast<Eigen::Index>(cols.size()) >= min_pixels &&
                        static_cast<Eigen::Index>(style_it->second.size()) >= min_pixels;
    if (!usable) {
      fallback.insert(fallback.end(), cols.begin(), cols.end());
      continue;
    }
    const FeatureMatrix content = center(gather_columns(content_raw, cols));
    const FeatureMatrix style = center(gather_columns(style_raw, style_it->second));
    Matrix region;
    try {
      ProjectionPair pair = build_projection_pair(
          content, style, eig_floor, std::string(context) + " label " + std::to_string(label));
      pair.label = label;
      region = apply_transform(pair, content, blend);
    } catch (const DegenerateRegionError&) {
      fallback.insert(fallback.end(), cols.begin(), cols.end());
      continue;
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out.col(cols[i]) = region.col(static_cast<Eigen::Index>(i));
    }
  }

  if (!fallback.empty()) {
    // Global pair from all pixels, applied with the global content mean so fallback pixels
    // are treated exactly as in the unlabeled transform.
    const FeatureMatrix content = center(content_raw);
    const FeatureMatrix style = center(style_raw);
    FeatureMatrix subset{gather_columns(content.values, fallback), content.mean};
    Matrix region;
    try {
      region = apply_transform(build_projection_pair(content, style, eig_floor, context), subset, blend);
    } catch (const DegenerateRegionError&) {
      region = mean_shift_transform(subset, style.mean, blend);
    }
    for (std::size_t i = 0; i < fallback.size(); ++i) {
      out.col(fallback[i]) = region.col(static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

}  // namespace photostyle::wct
