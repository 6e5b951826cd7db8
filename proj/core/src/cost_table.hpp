#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "semicoupling/problem.hpp"

namespace semicoupling::detail {

/// Costs and source gradients of every (cell, target) pair, cached once per
/// problem. Poles are stored as +inf cost with zero gradient.
class CostTable {
 public:
  explicit CostTable(const Problem& problem, bool with_gradients = true);

  int targets() const noexcept { return n_; }
  std::size_t cells() const noexcept { return cells_; }
  int dimension() const noexcept { return d_; }
  double cost(std::size_t cell, int i) const { return cost_[cell * n_ + i]; }
  const double* grad(std::size_t cell, int i) const { return &grad_[(cell * n_ + i) * d_]; }
  bool has_gradients() const noexcept { return !grad_.empty(); }
  /// Largest finite |cost|; sets the scale of float-noise ties.
  double max_abs_cost() const noexcept { return max_abs_cost_; }

 private:
  int n_ = 0;
  int d_ = 0;
  std::size_t cells_ = 0;
  double max_abs_cost_ = 0.0;
  std::vector<double> cost_;
  std::vector<double> grad_;
};

}  // namespace semicoupling::detail
