#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semicoupling/potential.hpp"
#include "semicoupling/problem.hpp"

namespace semicoupling {

/// Source mass of each transport cell {x : psi_i - c(x, y_i) = phi(x) >= 0}
/// by midpoint quadrature. Cells whose best scores tie up to rounding, or
/// sit on the inactive floor, are split among their tied targets so the
/// masses come as close to tau as the ties allow.
std::vector<double> cell_masses(const Problem& problem, const Potential& potential);

/// Source mass of the active domain {phi >= 0}.
double active_mass(const Problem& problem, const Potential& potential);

/// Kantorovich dual objective sum_i psi_i tau_i - int max(0, phi) dsigma.
/// Concave in psi.
double dual_functional(const Problem& problem, const Potential& potential);

/// Smallest supergradient of the dual objective, tau_i - sigma[cell_i] with
/// the tie split above.
Vector dual_gradient(const Problem& problem, const Potential& potential);

/// Transport cost of a semicoupling with the exact target marginals, built
/// from the cells of psi and repaired near their boundaries. Never below the
/// dual value (weak duality), so the difference certifies optimality.
double primal_cost(const Problem& problem, const Potential& potential);

struct DualIterate {
  int iteration = 0;
  double dual_value = 0.0;
  double residual = 0.0;
  double step = 0.0;
  std::string method;  // "init", "newton", "gradient", "coordinate"
};

struct DualSolution {
  Potential potential;
  std::vector<double> cell_masses;
  double dual_value = 0.0;
  double primal_value = 0.0;
  int iterations = 0;
  /// max_i |sigma[cell_i] - tau_i|, cells on the inactive floor counted
  /// fractionally
  double residual = 0.0;
  double active_mass = 0.0;
  std::vector<DualIterate> log;

  double gap() const { return primal_value - dual_value; }
  double relative_gap() const;
};

struct SolverOptions {
  int max_iters = 200;
  /// Extra Newton steps taken after the residual drops below tol_mass, as
  /// long as they keep reducing it toward the single-cell mass floor.
  int polish_iters = 6;
  std::optional<Vector> initial_psi;
};

/// Maximizes the dual objective. Throws ConvergenceError with the last
/// residual when tol_mass is not reached within max_iters.
DualSolution solve_dual(const Problem& problem, const SolverOptions& options = {});

}  // namespace semicoupling
