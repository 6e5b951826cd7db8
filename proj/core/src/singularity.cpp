#include "semicoupling/singularity.hpp"

#include <algorithm>

#include "semicoupling/error.hpp"
#include "semicoupling/problem.hpp"
#include "semicoupling/transform.hpp"

namespace semicoupling {

SubdifferentialSet subdifferential(const CostModel& cost, const TargetMeasure& target,
                                   const Potential& potential, const VectorRef& x, double tie) {
  const CellAssignment assign = cell_assignment(cost, target, potential, x, tie);
  if (!(assign.phi >= -tie)) throw DomainError("subdifferential: x lies outside the active domain");
  SubdifferentialSet out;
  out.point = x;
  out.indices = assign.indices;
  out.gaps.reserve(out.indices.size());
  for (int i : out.indices) out.gaps.push_back(score(cost, target, potential, i, x) - assign.phi);
  return out;
}

SubdifferentialSet subdifferential(const Problem& problem, const Potential& potential,
                                   const VectorRef& x, double tie) {
  return subdifferential(problem.cost(), problem.target(), potential, x, tie);
}

Matrix cross_diff_gradients(const CostModel& cost, const TargetMeasure& target,
                            const VectorRef& x, const std::vector<int>& indices) {
  const auto d = x.size();
  if (indices.size() < 2) return Matrix(0, d);
  Matrix rows(static_cast<Eigen::Index>(indices.size() - 1), d);
  const Vector g0 = cost.grad_x(x, target.point(indices[0]));
  for (std::size_t k = 1; k < indices.size(); ++k)
    rows.row(static_cast<Eigen::Index>(k - 1)) = (cost.grad_x(x, target.point(indices[k])) - g0).transpose();
  return rows;
}

int matrix_rank(const Matrix& rows, double tol_rank) {
  if (rows.rows() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(rows);
  const auto& sv = svd.singularValues();
  const double cutoff = tol_rank * std::max(sv.size() ? sv[0] : 0.0, 1.0);
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv[k] > cutoff) ++rank;
  return rank;
}

int stratum_rank(const CostModel& cost, const TargetMeasure& target, const Potential& potential,
                 const VectorRef& x, double tie, double tol_rank) {
  const auto sub = subdifferential(cost, target, potential, x, tie);
  return matrix_rank(cross_diff_gradients(cost, target, x, sub.indices), tol_rank);
}

int stratum_rank(const Problem& problem, const Potential& potential, const VectorRef& x,
                 double tie, double tol_rank) {
  return stratum_rank(problem.cost(), problem.target(), potential, x, tie, tol_rank);
}

TangentProjector tangent_projector(const CostModel& cost, const TargetMeasure& target,
                                   const VectorRef& x, const std::vector<int>& indices,
                                   double tol_rank) {
  const auto d = x.size();
  const Matrix rows = cross_diff_gradients(cost, target, x, indices);
  TangentProjector out;
  out.point = x;
  if (rows.rows() == 0) {
    out.basis = Matrix::Identity(d, d);
    out.projector = Matrix::Identity(d, d);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(rows, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = tol_rank * std::max(sv[0], 1.0);
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv[k] > cutoff) ++rank;
  out.rank = rank;
  out.basis = svd.matrixV().rightCols(d - rank);
  out.projector = out.basis * out.basis.transpose();
  return out;
}

TangentProjector tangent_projector(const Problem& problem, const Potential& potential,
                                   const VectorRef& x, double tie, double tol_rank) {
  const auto sub = subdifferential(problem, potential, x, tie);
  return tangent_projector(problem.cost(), problem.target(), x, sub.indices, tol_rank);
}

}  // namespace semicoupling
