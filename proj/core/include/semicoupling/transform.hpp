#pragma once

#include <vector>

#include "semicoupling/cost.hpp"
#include "semicoupling/measures.hpp"
#include "semicoupling/potential.hpp"

namespace semicoupling {

class Problem;

/// Score of target i at x, psi_i - c(x, y_i); -inf at a pole of the cost.
double score(const CostModel& cost, const TargetMeasure& target, const Potential& potential, int i,
             const VectorRef& x);

/// phi(x) = max_i (psi_i - c(x, y_i)).
double c_transform(const CostModel& cost, const TargetMeasure& target, const Potential& potential,
                   const VectorRef& x);
double c_transform(const Problem& problem, const Potential& potential, const VectorRef& x);

/// True iff phi(x) >= 0, that is some target has c(x, y_i) <= psi_i.
bool is_active(const Problem& problem, const Potential& potential, const VectorRef& x);

struct CellAssignment {
  bool active = false;
  double phi = 0.0;
  /// Indices whose score is within the tie tolerance of phi, ascending.
  std::vector<int> indices;
};

CellAssignment cell_assignment(const CostModel& cost, const TargetMeasure& target,
                               const Potential& potential, const VectorRef& x, double tie);
CellAssignment cell_assignment(const Problem& problem, const Potential& potential,
                               const VectorRef& x, double tie);

}  // namespace semicoupling
