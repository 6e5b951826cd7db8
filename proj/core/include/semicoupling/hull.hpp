#pragma once

#include <vector>

#include "semicoupling/linalg.hpp"

namespace semicoupling {

/// Nearest point of conv{p_i} to a query point, by Wolfe's min-norm-point
/// iteration over the columns of `points`.
struct HullProjection {
  Vector nearest;
  double distance = 0.0;
  /// Convex weights, one per column.
  std::vector<double> weights;
  int iterations = 0;
  bool converged = false;
};

HullProjection nearest_point_in_hull(const Matrix& points, const VectorRef& query,
                                     double tol = 1e-10, int max_iters = 1000);
/// Distance from the origin to the hull.
HullProjection min_norm_point(const Matrix& points, double tol = 1e-10, int max_iters = 1000);
double hull_distance(const Matrix& points, double tol = 1e-10);

}  // namespace semicoupling
