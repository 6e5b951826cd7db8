#include "cost_table.hpp"

#include <algorithm>
#include <cmath>

namespace semicoupling::detail {

CostTable::CostTable(const Problem& problem, bool with_gradients)
    : n_(problem.target().size()), d_(problem.dimension()), cells_(problem.grid().size()) {
  const auto& grid = problem.grid();
  const auto& target = problem.target();
  const auto& c = problem.cost();
  cost_.resize(cells_ * n_);
  if (with_gradients) grad_.assign(cells_ * n_ * d_, 0.0);
  for (std::size_t cell = 0; cell < cells_; ++cell) {
    const auto x = grid.center(cell);
    for (int i = 0; i < n_; ++i) {
      const auto y = target.point(i);
      if (!c.in_domain(x, y)) {
        cost_[cell * n_ + i] = std::numeric_limits<double>::infinity();
        continue;
      }
      cost_[cell * n_ + i] = c.eval(x, y);
      if (std::isfinite(cost_[cell * n_ + i]))
        max_abs_cost_ = std::max(max_abs_cost_, std::abs(cost_[cell * n_ + i]));
      if (with_gradients) {
        const Vector g = c.grad_x(x, y);
        for (int a = 0; a < d_; ++a) grad_[(cell * n_ + i) * d_ + a] = g[a];
      }
    }
  }
}

}  // namespace semicoupling::detail
