#include "semicoupling/hull.hpp"

#include <algorithm>
#include <cmath>

#include "semicoupling/error.hpp"

namespace semicoupling {

namespace {

/// Minimizer of |P a| over the affine hull of the columns in `active`, as
/// affine weights.
Vector affine_minimizer(const Matrix& p, const std::vector<int>& active) {
  const auto k = static_cast<Eigen::Index>(active.size());
  Matrix kkt = Matrix::Zero(k + 1, k + 1);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) kkt(a, b) = p.col(active[a]).dot(p.col(active[b]));
    kkt(a, k) = 1.0;
    kkt(k, a) = 1.0;
  }
  Vector rhs = Vector::Zero(k + 1);
  rhs[k] = 1.0;
  return kkt.completeOrthogonalDecomposition().solve(rhs).head(k);
}

}  // namespace

HullProjection min_norm_point(const Matrix& p, double tol, int max_iters) {
  const auto m = p.cols();
  if (m == 0) throw ValidationError("min_norm_point: empty point set");
  const double scale = std::max(p.colwise().squaredNorm().maxCoeff(), 1e-300);

  Eigen::Index first = 0;
  p.colwise().squaredNorm().minCoeff(&first);
  std::vector<int> active{static_cast<int>(first)};
  Vector lambda = Vector::Ones(1);
  Vector x = p.col(first);

  HullProjection out;
  for (int it = 0; it < max_iters; ++it) {
    out.iterations = it + 1;
    Eigen::Index j = 0;
    const double best = (p.transpose() * x).minCoeff(&j);
    if (x.squaredNorm() - best <= tol * scale ||
        std::find(active.begin(), active.end(), static_cast<int>(j)) != active.end()) {
      out.converged = true;
      break;
    }
    active.push_back(static_cast<int>(j));
    lambda.conservativeResize(lambda.size() + 1);
    lambda[lambda.size() - 1] = 0.0;

    for (int inner = 0; inner < static_cast<int>(m) + 1; ++inner) {
      const Vector alpha = affine_minimizer(p, active);
      if ((alpha.array() > tol).all()) {
        lambda = alpha;
        break;
      }
      // Step from lambda towards alpha until the first weight hits zero.
      double theta = 1.0;
      for (Eigen::Index a = 0; a < alpha.size(); ++a)
        if (alpha[a] <= tol && lambda[a] - alpha[a] > 0.0) theta = std::min(theta, lambda[a] / (lambda[a] - alpha[a]));
      lambda = lambda + theta * (alpha - lambda);
      std::vector<int> kept;
      std::vector<double> kept_w;
      for (Eigen::Index a = 0; a < lambda.size(); ++a) {
        if (lambda[a] > tol) {
          kept.push_back(active[a]);
          kept_w.push_back(lambda[a]);
        }
      }
      if (kept.empty()) {
        kept.push_back(active.back());
        kept_w.push_back(1.0);
      }
      active = kept;
      lambda = Eigen::Map<Vector>(kept_w.data(), static_cast<Eigen::Index>(kept_w.size()));
      lambda /= lambda.sum();
    }
    x = Vector::Zero(p.rows());
    for (std::size_t a = 0; a < active.size(); ++a) x += lambda[static_cast<Eigen::Index>(a)] * p.col(active[a]);
  }

  out.nearest = x;
  out.distance = x.norm();
  out.weights.assign(static_cast<std::size_t>(m), 0.0);
  for (std::size_t a = 0; a < active.size(); ++a) out.weights[active[a]] = lambda[static_cast<Eigen::Index>(a)];
  return out;
}

HullProjection nearest_point_in_hull(const Matrix& points, const VectorRef& query, double tol,
                                     int max_iters) {
  HullProjection out = min_norm_point(points.colwise() - query, tol, max_iters);
  out.nearest += query;
  return out;
}

double hull_distance(const Matrix& points, double tol) { return min_norm_point(points, tol).distance; }

}  // namespace semicoupling
