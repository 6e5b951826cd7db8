#include "semicoupling/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "semicoupling/error.hpp"
#include "semicoupling/problem.hpp"
#include "semicoupling/transform.hpp"

namespace semicoupling {

namespace {

void require_positive(const char* name, double v) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError(std::string("tolerances: ") + name + " must be finite and > 0");
}

}  // namespace

void Tolerances::validate() const {
  require_positive("tol_mass", tol_mass);
  if (tol_tie) require_positive("tol_tie", *tol_tie);
  require_positive("tie_scale", tie_scale);
  require_positive("tol_rank", tol_rank);
  require_positive("tol_twist", tol_twist);
  require_positive("eps_stop", eps_stop);
  require_positive("eps_uhs", eps_uhs);
  require_positive("max_flow_time", max_flow_time);
  require_positive("ode_rel_err", ode_rel_err);
}

double default_tie_tolerance(const Grid& grid, const CostModel& cost, const TargetMeasure& target,
                             const Potential& potential, double tie_scale) {
  double lip = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto x = grid.center(c);
    int best = -1;
    double phi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < target.size(); ++i) {
      const double s = score(cost, target, potential, i, x);
      if (s > phi) {
        phi = s;
        best = i;
      }
    }
    if (best >= 0 && phi >= 0.0) lip = std::max(lip, cost.grad_x(x, target.point(best)).norm());
  }
  // An empty active set leaves no ties to resolve; fall back to the box scale.
  if (lip == 0.0) lip = grid.box().diameter();
  return tie_scale * grid.max_spacing() * lip;
}

double default_tie_tolerance(const Problem& problem, const Potential& potential, double tie_scale) {
  return default_tie_tolerance(problem.grid(), problem.cost(), problem.target(), potential, tie_scale);
}

double Tolerances::tie_tolerance(const Problem& problem, const Potential& potential) const {
  return tol_tie ? *tol_tie : default_tie_tolerance(problem, potential, tie_scale);
}

std::vector<std::string> tolerance_warnings(const Problem& problem, const Potential& potential,
                                            const Tolerances& tolerances) {
  std::vector<std::string> out;
  const double tie = tolerances.tie_tolerance(problem, potential);
  const Grid& grid = problem.grid();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const double phi = c_transform(problem, potential, grid.center(c));
    if (phi >= 0.0) {
      lo = std::min(lo, phi);
      hi = std::max(hi, phi);
    }
  }
  if (hi > lo && tie > 0.1 * (hi - lo)) {
    std::ostringstream msg;
    msg << "tie tolerance " << tie << " is not small against the score spread " << (hi - lo)
        << " over the active cells";
    out.push_back(msg.str());
  }
  if (tolerances.eps_stop / 10.0 > tie) out.push_back("eps_stop/10 exceeds the tie tolerance");
  return out;
}

}  // namespace semicoupling
