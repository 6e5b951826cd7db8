#include "semicoupling/retraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semicoupling/error.hpp"
#include "semicoupling/problem.hpp"
#include "semicoupling/singularity.hpp"

namespace semicoupling {

IntegratorOptions integrator_options(const Tolerances& tol, double length_scale) {
  IntegratorOptions opt;
  opt.length_scale = length_scale;
  opt.rel_err = tol.ode_rel_err;
  opt.eps_stop = tol.eps_stop;
  opt.eps_field = tol.eps_uhs;
  opt.max_time = tol.max_flow_time;
  return opt;
}

FlowField::FlowField(const Problem& problem, const Potential& potential, FieldSpec spec,
                     Tolerances tolerances)
    : problem_(&problem), potential_(&potential), spec_(std::move(spec)), tolerances_(std::move(tolerances)) {
  tolerances_.validate();
  spec_.validate(problem.target().size());
  if (potential.size() != problem.target().size())
    throw ValidationError("FlowField: potential size does not match the target");
  if (spec_.mode == FlowMode::cellular) tie_ = tolerances_.tie_tolerance(problem, potential);
}

FlowSystem FlowField::system(const VectorRef& seed, std::vector<int>* tied_out) const {
  const Problem& problem = *problem_;
  const Potential& potential = *potential_;
  const FieldSpec spec = spec_;
  FlowSystem sys;
  if (spec.mode == FlowMode::off_domain) {
    sys.velocity = [&problem, &potential, spec](const Vector& x) -> Vector {
      return -eta_off_domain(problem, potential, x, spec);
    };
    sys.gap = [&problem, &potential](const Vector& x) { return u_min(problem, potential, x); };
    return sys;
  }

  const auto sub = subdifferential(problem, potential, seed, tie_);
  const int rank = matrix_rank(cross_diff_gradients(problem.cost(), problem.target(), seed, sub.indices),
                               tolerances_.tol_rank);
  if (rank != spec.stratum - 1)
    throw DomainError("cellular flow: seed is not in Z_" + std::to_string(spec.stratum) + " - Z_" +
                      std::to_string(spec.stratum + 1));
  const std::vector<int> tied = sub.indices;
  if (tied_out) *tied_out = tied;
  const double tol_rank = tolerances_.tol_rank;
  const double proj_tol = tie_ * 1e-6;
  sys.velocity = [&problem, &potential, spec, tied, tol_rank](const Vector& x) -> Vector {
    return -cellular_terms(problem, potential, x, tied, tied.front(), spec, tol_rank).eta;
  };
  sys.gap = [&problem, &potential, tied](const Vector& x) { return next_tie_gap(problem, potential, x, tied); };
  if (tied.size() >= 2) {
    sys.project = [&problem, &potential, tied, proj_tol](const Vector& x) {
      return project_to_ties(problem, potential, x, tied, proj_tol);
    };
    sys.drift = [&problem, &potential, tied](const Vector& x) {
      return tie_residual(problem, potential, x, tied).lpNorm<Eigen::Infinity>();
    };
  }
  return sys;
}

Trajectory FlowField::integrate(const VectorRef& seed) const {
  return semicoupling::integrate(system(seed), seed, integrator_options(tolerances_, problem_->grid().box().diameter()));
}

Trajectory integrate_flow(const VectorRef& x0, const FieldSpec& spec, const Problem& problem,
                          const Potential& potential, const Tolerances& tolerances) {
  return FlowField(problem, potential, spec, tolerances).integrate(x0);
}

Reparameterization reparameterize(const Trajectory& traj, int samples) {
  if (traj.terminated_by != Termination::pole_reached)
    throw ValidationError("reparameterize: trajectory did not reach the pole");
  if (samples < 2) throw ValidationError("reparameterize: need at least two samples");
  const auto& pts = traj.samples;
  const auto d = pts.front().x.size();
  Reparameterization out;
  out.x.resize(d, samples);
  // The last segment is the ray refinement when its end is not an ODE step.
  const bool refined = pts.size() >= 2 && traj.accepted_steps + 1 < static_cast<int>(pts.size());
  std::size_t seg = 0;
  for (int k = 0; k < samples; ++k) {
    const double s = static_cast<double>(k) / (samples - 1);
    out.s.push_back(s);
    if (k == 0 || pts.size() == 1) {
      out.x.col(k) = pts.front().x;
      continue;
    }
    if (k == samples - 1) {
      out.x.col(k) = pts.back().x;
      continue;
    }
    const double t = s * traj.omega;
    while (seg + 2 < pts.size() && pts[seg + 1].t < t) ++seg;
    const auto& a = pts[seg];
    const auto& b = pts[seg + 1];
    const double dt = b.t - a.t;
    const double tau = dt > 0.0 ? std::clamp((t - a.t) / dt, 0.0, 1.0) : 1.0;
    if (refined && seg + 2 == pts.size()) {
      out.x.col(k) = (1.0 - tau) * a.x + tau * b.x;
      continue;
    }
    const double t2 = tau * tau, t3 = t2 * tau;
    out.x.col(k) = (2 * t3 - 3 * t2 + 1) * a.x + (t3 - 2 * t2 + tau) * dt * a.velocity +
                   (-2 * t3 + 3 * t2) * b.x + (t3 - t2) * dt * b.velocity;
  }
  return out;
}

RegionFlow retract_region(const Matrix& seeds, const FieldSpec& spec, const Problem& problem,
                          const Potential& potential, const Tolerances& tolerances) {
  const FlowField field(problem, potential, spec, tolerances);
  RegionFlow out;
  out.trajectories.reserve(static_cast<std::size_t>(seeds.cols()));
  for (Eigen::Index k = 0; k < seeds.cols(); ++k) {
    out.trajectories.push_back(field.integrate(seeds.col(k)));
    if (out.trajectories.back().terminated_by == Termination::pole_reached)
      ++out.pole_reached;
    else
      out.failures.push_back(static_cast<std::size_t>(k));
  }

  std::vector<double> ratios;
  for (Eigen::Index i = 0; i < seeds.cols(); ++i) {
    const auto& ti = out.trajectories[i];
    if (ti.terminated_by != Termination::pole_reached) continue;
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index nb = -1;
    for (Eigen::Index j = 0; j < seeds.cols(); ++j) {
      if (j == i) continue;
      const double dist = (seeds.col(i) - seeds.col(j)).norm();
      if (dist > 0.0 && dist < best) {
        best = dist;
        nb = j;
      }
    }
    if (nb < 0 || out.trajectories[nb].terminated_by != Termination::pole_reached) continue;
    ratios.push_back(std::abs(ti.omega - out.trajectories[nb].omega) / best);
  }
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    out.max_neighbor_ratio = ratios.back();
    out.median_neighbor_ratio = ratios[ratios.size() / 2];
  }
  return out;
}

Matrix lattice(const Box& box, const std::vector<int>& per_axis) {
  const int d = box.dimension();
  std::vector<int> n(per_axis);
  if (n.size() == 1) n.assign(static_cast<std::size_t>(d), per_axis.front());
  if (static_cast<int>(n.size()) != d) throw ValidationError("lattice: wrong number of axis counts");
  Eigen::Index total = 1;
  for (int c : n) {
    if (c < 1) throw ValidationError("lattice: axis counts must be positive");
    total *= c;
  }
  Matrix out(d, total);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rest = flat;
    for (int a = 0; a < d; ++a) {
      const int idx = static_cast<int>(rest % n[a]);
      rest /= n[a];
      const double frac = n[a] == 1 ? 0.5 : static_cast<double>(idx) / (n[a] - 1);
      out(a, flat) = box.lo[a] + frac * (box.hi[a] - box.lo[a]);
    }
  }
  return out;
}

}  // namespace semicoupling
