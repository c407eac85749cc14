#include "photostyle/smoothing.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "photostyle/errors.hpp"

namespace photostyle::smoothing {
namespace {

using ColSparse = Eigen::SparseMatrix<double, Eigen::ColMajor>;

SparseMatrix system_matrix(const SmoothingProblem& p) {
  SparseMatrix identity(p.s.rows(), p.s.cols());
  identity.setIdentity();
  return identity - p.alpha * p.s;
}

Eigen::MatrixXd residual(const SmoothingProblem& p, const Eigen::MatrixXd& r) {
  return r - p.alpha * (p.s * r) - (1.0 - p.alpha) * p.y;
}

// Jacobi-preconditioned CG on the symmetric positive definite I - alpha S, one column at a time.
Eigen::VectorXd conjugate_gradient(const SparseMatrix& a, const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& inv_diag, double tolerance,
                                   int max_iterations) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  const double b_norm = b.norm();
  if (b_norm == 0.0) return x;
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = inv_diag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd ap = a * p;
    const double step = rz / p.dot(ap);
    x += step * p;
    r -= step * ap;
    if (r.norm() <= tolerance * b_norm) return x;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw NumericError("conjugate gradient did not reach tolerance " + std::to_string(tolerance) +
                     " in " + std::to_string(max_iterations) + " iterations; try a larger lambda");
}

}  // namespace

SparseMatrix normalized_operator(const SparseAffinity& affinity) {
  const Eigen::VectorXd& d = affinity.degree;
  if (d.size() != affinity.weights.rows()) {
    throw ConfigError("normalized operator: degree vector does not match the affinity");
  }
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) {
      throw NumericError("degenerate affinity graph: pixel " + std::to_string(i) + " has degree " +
                         std::to_string(d(i)));
    }
  }
  const Eigen::VectorXd inv_sqrt = d.cwiseSqrt().cwiseInverse();
  SparseMatrix s = affinity.weights;
  for (Eigen::Index i = 0; i < s.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(s, i); it; ++it) {
      it.valueRef() *= inv_sqrt(it.row()) * inv_sqrt(it.col());
    }
  }
  return s;
}

double alpha_from_lambda(double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  return 1.0 / (1.0 + lambda);
}

Eigen::MatrixXd to_pixel_matrix(const nn::Tensor& image) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(image.plane_size()), image.channels());
  for (int c = 0; c < image.channels(); ++c) {
    auto src = image.channel(c);
    for (std::size_t i = 0; i < src.size(); ++i) m(static_cast<Eigen::Index>(i), c) = src[i];
  }
  return m;
}

nn::Tensor from_pixel_matrix(const Eigen::MatrixXd& m, int height, int width) {
  nn::Tensor t(static_cast<int>(m.cols()), height, width);
  for (int c = 0; c < t.channels(); ++c) {
    auto dst = t.channel(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<float>(m(static_cast<Eigen::Index>(i), c));
  }
  return t;
}

SmoothingProblem make_problem(const nn::Tensor& y, const SparseAffinity& affinity, double lambda) {
  if (static_cast<Eigen::Index>(y.plane_size()) != affinity.size()) {
    throw ConfigError("smoothing: image has " + std::to_string(y.plane_size()) +
                      " pixels, affinity covers " + std::to_string(affinity.size()));
  }
  SmoothingProblem p;
  p.y = to_pixel_matrix(y);
  p.s = normalized_operator(affinity);
  p.alpha = alpha_from_lambda(lambda);
  return p;
}

double relative_residual(const SmoothingProblem& problem, const Eigen::MatrixXd& r) {
  const double y_norm = problem.y.cwiseAbs().maxCoeff();
  const double res = residual(problem, r).cwiseAbs().maxCoeff();
  return y_norm > 0.0 ? res / y_norm : res;
}

Eigen::MatrixXd solve_exact(const SmoothingProblem& problem, const SolveOptions& options) {
  if (!(problem.alpha > 0.0 && problem.alpha < 1.0)) {
    throw ConfigError("smoothing: alpha must lie in (0, 1)");
  }
  const SparseMatrix a = system_matrix(problem);
  const Eigen::MatrixXd rhs = (1.0 - problem.alpha) * problem.y;
  Eigen::MatrixXd r(rhs.rows(), rhs.cols());

  if (options.solver == LinearSolver::kSparseLU) {
    Eigen::SparseLU<ColSparse, Eigen::COLAMDOrdering<int>> lu;
    const ColSparse a_col = a;
    lu.analyzePattern(a_col);
    lu.factorize(a_col);
    if (lu.info() != Eigen::Success) {
      throw NumericError("sparse LU factorisation failed (" + lu.lastErrorMessage() +
                         "); the system is singular, try a larger lambda");
    }
    r = lu.solve(rhs);
    // Iterative refinement against the same factorisation.
    for (int pass = 0; pass < 3 && relative_residual(problem, r) > options.residual_tolerance; ++pass) {
      r -= lu.solve(residual(problem, r));
    }
  } else {
    const Eigen::VectorXd inv_diag = Eigen::VectorXd(a.diagonal()).cwiseInverse();
    const int max_it = options.cg_max_iterations > 0 ? options.cg_max_iterations
                                                     : static_cast<int>(10 * a.rows());
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
      r.col(c) = conjugate_gradient(a, rhs.col(c), inv_diag, options.cg_tolerance, max_it);
    }
  }

  const double achieved = relative_residual(problem, r);
  if (!(achieved <= options.residual_tolerance)) {
    throw NumericError("smoothing solve reached relative residual " + std::to_string(achieved) +
                       ", above " + std::to_string(options.residual_tolerance) +
                       "; try a larger lambda");
  }
  return r;
}

nn::Tensor pad_replicate(const nn::Tensor& image, int border) {
  if (border <= 0) return image;
  const int h = image.height();
  const int w = image.width();
  nn::Tensor out(image.channels(), h + 2 * border, w + 2 * border);
  for (int c = 0; c < image.channels(); ++c) {
    for (int y = 0; y < out.height(); ++y) {
      const int sy = std::clamp(y - border, 0, h - 1);
      for (int x = 0; x < out.width(); ++x) {
        out.at(c, y, x) = image.at(c, sy, std::clamp(x - border, 0, w - 1));
      }
    }
  }
  return out;
}

nn::Tensor crop(const nn::Tensor& image, int border) {
  if (border <= 0) return image;
  nn::Tensor out(image.channels(), image.height() - 2 * border, image.width() - 2 * border);
  for (int c = 0; c < out.channels(); ++c) {
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) out.at(c, y, x) = image.at(c, y + border, x + border);
    }
  }
  return out;
}

nn::Tensor smooth_exact_unclamped(const nn::Tensor& y, const nn::Tensor& content,
                                  const SmoothingConfig& config) {
  const SparseAffinity w = config.affinity == AffinityKind::kMatting
                               ? matting_affinity(content, config.matting_epsilon, config.negatives)
                               : gaussian_affinity(content, config.sigma);
  const SmoothingProblem problem = make_problem(y, w, config.lambda);
  return from_pixel_matrix(solve_exact(problem, config.solve), y.height(), y.width());
}

nn::Tensor smooth(const nn::Tensor& y, const nn::Tensor& content, const SmoothingConfig& config) {
  if (y.height() != content.height() || y.width() != content.width()) {
    throw ConfigError("smoothing: stylized image and content differ in size");
  }
  nn::Tensor out;
  if (config.mode == SmoothingMode::kExact) {
    const int border = std::max(0, config.border);
    out = crop(smooth_exact_unclamped(pad_replicate(y, border), pad_replicate(content, border), config),
               border);
  } else {
    GuidedFilterParams params = config.guided;
    if (params.radius <= 0) params.radius = default_guided_params(content.height(), content.width()).radius;
    out = guided_filter(y, content, params);
  }
  for (float& v : out.values()) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

}  // namespace photostyle::smoothing
