#pragma once

#include <cstddef>
#include <vector>

#include "semicoupling/fields.hpp"
#include "semicoupling/grid.hpp"
#include "semicoupling/integrator.hpp"
#include "semicoupling/tolerances.hpp"

namespace semicoupling {

class Problem;

/// Length scale defaults to 1; FlowField uses the box diameter.
IntegratorOptions integrator_options(const Tolerances& tolerances, double length_scale = 1.0);

/// Blow-up flow of an averaged field. Off-domain mode flows along -eta_avg
/// towards the active domain; cellular mode flows along the projected field
/// within the seed's tie variety towards the next stratum. Both directions
/// strictly decrease the gap (u_min, or the smallest gap to a non-tied
/// target).
class FlowField {
 public:
  FlowField(const Problem& problem, const Potential& potential, FieldSpec spec, Tolerances tolerances);

  const FieldSpec& spec() const noexcept { return spec_; }
  const Tolerances& tolerances() const noexcept { return tolerances_; }
  /// Resolved tie tolerance (cellular mode only computes it).
  double tie() const noexcept { return tie_; }

  /// Flow system for a seed. In cellular mode the seed's tied set is frozen;
  /// throws DomainError when the seed is not in Z_j - Z_{j+1}.
  FlowSystem system(const VectorRef& seed, std::vector<int>* tied = nullptr) const;
  Trajectory integrate(const VectorRef& seed) const;

 private:
  const Problem* problem_;
  const Potential* potential_;
  FieldSpec spec_;
  Tolerances tolerances_;
  double tie_ = 0.0;
};

Trajectory integrate_flow(const VectorRef& x0, const FieldSpec& spec, const Problem& problem,
                          const Potential& potential, const Tolerances& tolerances);

/// Psi'(x0, s) = Psi(x0, s omega) on a uniform grid of s in [0, 1]. Cubic
/// Hermite in t between integrator samples, linear on the endpoint
/// refinement segment. Throws ValidationError unless pole_reached.
struct Reparameterization {
  std::vector<double> s;
  /// One column per s value.
  Matrix x;
};

Reparameterization reparameterize(const Trajectory& trajectory, int samples = 33);

struct RegionFlow {
  std::vector<Trajectory> trajectories;
  std::size_t pole_reached = 0;
  /// Seeds whose flow did not reach the pole (UHS failure witnesses).
  std::vector<std::size_t> failures;
  /// |omega_i - omega_j| / |x_i - x_j| over each seed and its nearest
  /// neighbour, pole_reached pairs only.
  double max_neighbor_ratio = 0.0;
  double median_neighbor_ratio = 0.0;
  bool all_pole_reached() const { return failures.empty(); }
};

/// Flows from every seed column.
RegionFlow retract_region(const Matrix& seeds, const FieldSpec& spec, const Problem& problem,
                          const Potential& potential, const Tolerances& tolerances);

/// Node lattice over a box, `per_axis` nodes along each axis including the
/// faces, axis 0 fastest.
Matrix lattice(const Box& box, const std::vector<int>& per_axis);

}  // namespace semicoupling
