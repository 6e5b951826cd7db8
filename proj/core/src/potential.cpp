#include "semicoupling/potential.hpp"

#include "semicoupling/error.hpp"
#include "semicoupling/problem.hpp"
#include "semicoupling/transform.hpp"

namespace semicoupling {

Potential::Potential(Vector psi) : psi_(std::move(psi)) {
  if (!psi_.allFinite()) throw ValidationError("potential: non-finite entry");
}

void Potential::cache_phi(const Problem& problem) {
  if (problem.target().size() != size())
    throw ValidationError("potential: size differs from the target point count");
  const Grid& grid = problem.grid();
  std::vector<double> phi(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) phi[c] = c_transform(problem, *this, grid.center(c));
  phi_field_ = std::move(phi);
}

}  // namespace semicoupling
