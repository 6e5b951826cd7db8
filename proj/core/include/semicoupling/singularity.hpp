#pragma once

#include <vector>

#include "semicoupling/cost.hpp"
#include "semicoupling/measures.hpp"
#include "semicoupling/potential.hpp"

namespace semicoupling {

class Problem;

/// Targets tied at x: indices whose score is within the tie tolerance of
/// phi(x), with their gaps psi_i - c(x, y_i) - phi(x) in [-tie, 0].
struct SubdifferentialSet {
  Vector point;
  std::vector<int> indices;
  std::vector<double> gaps;
};

/// Throws DomainError when x is inactive beyond the tie tolerance.
SubdifferentialSet subdifferential(const CostModel& cost, const TargetMeasure& target,
                                   const Potential& potential, const VectorRef& x, double tie);
SubdifferentialSet subdifferential(const Problem& problem, const Potential& potential,
                                   const VectorRef& x, double tie);

/// Rows grad_x c(x, y_k) - grad_x c(x, y_0) for the tied indices after the
/// first. Empty (0 x d) for fewer than two indices.
Matrix cross_diff_gradients(const CostModel& cost, const TargetMeasure& target,
                            const VectorRef& x, const std::vector<int>& indices);

/// Number of singular values above tol_rank * max(largest, 1).
int matrix_rank(const Matrix& rows, double tol_rank);

/// Span dimension j of the cross-difference gradients at x; x lies in
/// Z_{j+1}.
int stratum_rank(const CostModel& cost, const TargetMeasure& target, const Potential& potential,
                 const VectorRef& x, double tie, double tol_rank);
int stratum_rank(const Problem& problem, const Potential& potential, const VectorRef& x,
                 double tie, double tol_rank);

/// Orthogonal projection onto the common null space of the cross-difference
/// gradients, the tangent space of the cell Z'(x).
struct TangentProjector {
  Vector point;
  /// Orthonormal basis of the tangent space, one column per direction.
  Matrix basis;
  Matrix projector;
  int rank = 0;
  bool zero_dimensional() const { return basis.cols() == 0; }
};

TangentProjector tangent_projector(const CostModel& cost, const TargetMeasure& target,
                                   const VectorRef& x, const std::vector<int>& indices,
                                   double tol_rank);
TangentProjector tangent_projector(const Problem& problem, const Potential& potential,
                                   const VectorRef& x, double tie, double tol_rank);

}  // namespace semicoupling
