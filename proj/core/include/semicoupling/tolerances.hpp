#pragma once

#include <optional>
#include <string>
#include <vector>

namespace semicoupling {

class CostModel;
class Grid;
class Problem;
class Potential;
class TargetMeasure;

/// Numerical tolerances shared by every stage. All values are strictly
/// positive; `validate` throws ValidationError otherwise.
struct Tolerances {
  /// Absolute mass residual accepted by the dual solver.
  double tol_mass = 1e-3;
  /// Energy gap below which two targets count as tied. When unset the
  /// grid default tie_scale * h * L is used, h the grid spacing and L the
  /// largest cost gradient over the active cells.
  std::optional<double> tol_tie;
  double tie_scale = 10.0;
  /// Relative singular value cutoff for stratum ranks.
  double tol_rank = 1e-8;
  /// Minimum gradient separation accepted by the twist audit.
  double tol_twist = 1e-8;
  /// Flow stop threshold on the gap to the pole.
  double eps_stop = 1e-4;
  /// Field norm floor below which a flow is declared vanished.
  double eps_uhs = 1e-6;
  double max_flow_time = 1e3;
  double ode_rel_err = 1e-9;

  void validate() const;

  /// Resolved tie tolerance for a potential on a grid.
  double tie_tolerance(const Problem& problem, const Potential& potential) const;
};

/// Grid default for the tie tolerance, tie_scale * h * L.
double default_tie_tolerance(const Grid& grid, const CostModel& cost, const TargetMeasure& target,
                             const Potential& potential, double tie_scale);
double default_tie_tolerance(const Problem& problem, const Potential& potential, double tie_scale);

/// Warnings for tolerances that look mis-scaled against the potential, for
/// instance a tie tolerance comparable to the spread of the scores.
std::vector<std::string> tolerance_warnings(const Problem& problem, const Potential& potential,
                                            const Tolerances& tolerances);

}  // namespace semicoupling
