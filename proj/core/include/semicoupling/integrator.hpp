#pragma once

#include <functional>
#include <string>
#include <vector>

#include "semicoupling/linalg.hpp"

namespace semicoupling {

/// An autonomous flow with a scalar gap that must decrease to zero.
struct FlowSystem {
  /// Velocity field; may throw DomainError, which the integrator treats as
  /// a rejected step.
  std::function<Vector(const Vector&)> velocity;
  /// Distance-like gap to the target set; the flow stops when it is small.
  std::function<double(const Vector&)> gap;
  /// Optional map back onto a constraint manifold after each step.
  std::function<Vector(const Vector&)> project;
  /// Optional constraint residual measured before projecting.
  std::function<double(const Vector&)> drift;
};

struct IntegratorOptions {
  /// Local error per step <= rel_err * max(|x|, length_scale), inf-norm.
  double rel_err = 1e-9;
  double length_scale = 1.0;
  double eps_stop = 1e-4;
  /// Field norm floor for field_vanished.
  double eps_field = 1e-6;
  double max_time = 1e3;
  int max_steps = 200000;
  /// Step cap as a fraction of the time the gap would take to close at the
  /// current rate.
  double cap_fraction = 0.1;
};

enum class Termination { pole_reached, max_time, field_vanished };
std::string to_string(Termination t);
Termination termination_from_string(const std::string& name);

struct TrajectorySample {
  double t = 0.0;
  Vector x;
  double gap = 0.0;
  Vector velocity;
};

struct Trajectory {
  Vector seed;
  std::vector<TrajectorySample> samples;
  /// Accumulated flow time; the blow-up time estimate when pole_reached.
  double omega = 0.0;
  Vector endpoint;
  Termination terminated_by = Termination::max_time;
  /// Largest constraint residual seen before projection.
  double max_drift = 0.0;
  int accepted_steps = 0;
  int rejected_steps = 0;
};

/// Adaptive Dormand-Prince 5(4) integration until the gap drops below
/// eps_stop; the final point is refined along the last velocity ray to a gap
/// in (0, eps_stop / 10]. Every accepted step strictly decreases the gap.
Trajectory integrate(const FlowSystem& system, const VectorRef& x0, const IntegratorOptions& options);

}  // namespace semicoupling
