#include "semicoupling/transform.hpp"

#include <limits>

#include "semicoupling/problem.hpp"

namespace semicoupling {

double score(const CostModel& cost, const TargetMeasure& target, const Potential& potential, int i,
             const VectorRef& x) {
  const auto y = target.point(i);
  if (!cost.in_domain(x, y)) return -std::numeric_limits<double>::infinity();
  return potential[i] - cost.eval(x, y);
}

double c_transform(const CostModel& cost, const TargetMeasure& target, const Potential& potential,
                   const VectorRef& x) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < target.size(); ++i) best = std::max(best, score(cost, target, potential, i, x));
  return best;
}

double c_transform(const Problem& problem, const Potential& potential, const VectorRef& x) {
  return c_transform(problem.cost(), problem.target(), potential, x);
}

bool is_active(const Problem& problem, const Potential& potential, const VectorRef& x) {
  return c_transform(problem, potential, x) >= 0.0;
}

CellAssignment cell_assignment(const CostModel& cost, const TargetMeasure& target,
                               const Potential& potential, const VectorRef& x, double tie) {
  const int n = target.size();
  std::vector<double> s(static_cast<std::size_t>(n));
  CellAssignment out;
  out.phi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    s[i] = score(cost, target, potential, i, x);
    out.phi = std::max(out.phi, s[i]);
  }
  out.active = out.phi >= 0.0;
  for (int i = 0; i < n; ++i)
    if (s[i] >= out.phi - tie) out.indices.push_back(i);
  return out;
}

CellAssignment cell_assignment(const Problem& problem, const Potential& potential,
                               const VectorRef& x, double tie) {
  return cell_assignment(problem.cost(), problem.target(), potential, x, tie);
}

}  // namespace semicoupling
