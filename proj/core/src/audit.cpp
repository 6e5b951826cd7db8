#include "semicoupling/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "semicoupling/error.hpp"

namespace semicoupling {

bool AuditReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AssumptionCheck& AuditReport::check(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return c;
  throw ValidationError("audit: no check named " + id);
}

namespace {

Matrix sample_lattice(const Box& box, int per_axis) {
  const int d = box.dimension();
  std::size_t count = 1;
  for (int a = 0; a < d; ++a) count *= static_cast<std::size_t>(per_axis);
  Matrix out(d, static_cast<Eigen::Index>(count));
  std::vector<int> idx(d, 0);
  for (std::size_t s = 0; s < count; ++s) {
    for (int a = 0; a < d; ++a)
      out(a, static_cast<Eigen::Index>(s)) =
          box.lo[a] + (idx[a] + 0.5) * (box.hi[a] - box.lo[a]) / per_axis;
    for (int a = 0; a < d; ++a) {
      if (++idx[a] < per_axis) break;
      idx[a] = 0;
    }
  }
  return out;
}

}  // namespace

AuditReport audit_assumptions(const CostModel& cost, const SourceMeasure& source,
                              const TargetMeasure& target, const Tolerances& tolerances,
                              int samples_per_axis) {
  const Box& box = source.grid().box();
  const int d = box.dimension();
  const Matrix lattice = sample_lattice(box, std::max(2, samples_per_axis));
  const Matrix corners = box.corners();
  Matrix samples(d, lattice.cols() + corners.cols());
  samples << lattice, corners;
  const double spacing = (box.hi - box.lo).minCoeff() / std::max(2, samples_per_axis);
  const int n = target.size();

  AuditReport report;
  report.samples = static_cast<std::size_t>(samples.cols());

  AssumptionCheck a0{"A0", "cost finite and bounded below by 0", true, {}, {}, {}};
  AssumptionCheck a1{"A1", "Hessian in x exists and is finite", true, {}, {}, {}};
  AssumptionCheck a3{"A3", "x -> grad_x c(x, y) does not vanish on an open set", true, {}, {}, {}};
  AssumptionCheck a4{"A4", "twist: y -> grad_x c(x, y) injective", true, {}, {}, {}};
  AssumptionCheck a5{"A5", "y -> c(x, y) continuously differentiable", true, {}, {}, {}};

  double max_hessian = 0.0;
  double min_twist = std::numeric_limits<double>::infinity();
  double min_cost = std::numeric_limits<double>::infinity();

  for (Eigen::Index s = 0; s < samples.cols(); ++s) {
    const Vector x = samples.col(s);
    const bool is_corner = s >= lattice.cols();
    std::vector<Vector> grads(static_cast<std::size_t>(n));
    std::vector<bool> ok(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
      const auto y = target.point(i);
      if (!cost.in_domain(x, y)) continue;
      ok[i] = true;
      const double c = cost.eval(x, y);
      min_cost = std::min(min_cost, c);
      if (a0.passed && (!std::isfinite(c) || c < 0.0)) {
        a0.passed = false;
        a0.witness_point = x;
        a0.witness_targets = std::make_pair(i, i);
      }
      grads[i] = cost.grad_x(x, y);
      if (is_corner) continue;

      const Matrix h = cost.hess_x(x, y);
      if (!h.allFinite()) {
        if (a1.passed) {
          a1.passed = false;
          a1.witness_point = x;
          a1.witness_targets = std::make_pair(i, i);
        }
      } else {
        max_hessian = std::max(max_hessian, h.norm());
      }

      if (a3.passed && grads[i].norm() <= tolerances.tol_twist) {
        // Vanishing at x alone is allowed; vanishing on a whole stencil is not.
        bool flat = true;
        Vector xp = x;
        for (int a = 0; a < d && flat; ++a) {
          for (double sign : {-0.5, 0.5}) {
            xp[a] = x[a] + sign * spacing;
            if (cost.in_domain(xp, y) && cost.grad_x(xp, y).norm() > tolerances.tol_twist) flat = false;
            xp[a] = x[a];
          }
        }
        if (flat) {
          a3.passed = false;
          a3.witness_point = x;
          a3.witness_targets = std::make_pair(i, i);
        }
      }

      if (a5.passed) {
        const double step = 1e-4 * std::max(1.0, box.diameter());
        if (cost.in_domain(x, y)) {
          const Vector g1 = finite_difference_grad_y(cost, x, y, step);
          const Vector g2 = finite_difference_grad_y(cost, x, y, 0.5 * step);
          if (!g1.allFinite() || !g2.allFinite() || (g1 - g2).norm() > 1e-4 * (1.0 + g2.norm())) {
            a5.passed = false;
            a5.witness_point = x;
            a5.witness_targets = std::make_pair(i, i);
          }
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!ok[i] || !ok[j]) continue;
        const double sep = (grads[i] - grads[j]).norm();
        min_twist = std::min(min_twist, sep);
        if (a4.passed && !(sep > tolerances.tol_twist)) {
          a4.passed = false;
          a4.witness_point = x;
          a4.witness_targets = std::make_pair(i, j);
        }
      }
    }
  }

  std::ostringstream msg;
  msg << "min cost " << min_cost;
  a0.detail = msg.str();
  msg.str("");
  msg << "max Hessian norm " << max_hessian;
  a1.detail = msg.str();
  msg.str("");
  msg << "min gradient separation " << (n > 1 ? min_twist : 0.0);
  a4.detail = msg.str();

  report.checks = {a0, a1, a3, a4, a5};
  return report;
}

}  // namespace semicoupling
