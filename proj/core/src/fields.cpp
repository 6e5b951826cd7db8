#include "semicoupling/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semicoupling/error.hpp"
#include "semicoupling/problem.hpp"
#include "semicoupling/singularity.hpp"
#include "semicoupling/transform.hpp"

namespace semicoupling {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double total_weight(const FieldSpec& spec, int n) {
  double w = 0.0;
  for (int i = 0; i < n; ++i) w += spec.weight(i);
  return w;
}

}  // namespace

std::string to_string(FlowMode mode) { return mode == FlowMode::off_domain ? "offdomain" : "cellular"; }

FlowMode flow_mode_from_string(const std::string& name) {
  if (name == "offdomain" || name == "off_domain") return FlowMode::off_domain;
  if (name == "cellular") return FlowMode::cellular;
  throw ValidationError("unknown flow mode '" + name + "'");
}

void FieldSpec::validate(int targets) const {
  if (!(beta >= 2.0) || !std::isfinite(beta)) throw ValidationError("FieldSpec: beta must be >= 2");
  if (mode == FlowMode::cellular && stratum < 1) throw ValidationError("FieldSpec: stratum must be >= 1");
  if (!weights.empty()) {
    if (static_cast<int>(weights.size()) != targets) throw ValidationError("FieldSpec: weight count mismatch");
    for (double w : weights)
      if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("FieldSpec: weights must be positive");
  }
  if (!order.empty()) {
    if (static_cast<int>(order.size()) != targets) throw ValidationError("FieldSpec: order count mismatch");
    for (double o : order)
      if (!(o > 0.0) || !std::isfinite(o)) throw ValidationError("FieldSpec: orders must be positive");
  }
}

double FieldSpec::weight(int i) const { return weights.empty() ? 1.0 : weights[i]; }
double FieldSpec::order_of(int i) const { return order.empty() ? 1.0 : order[i]; }

double u_min(const Problem& problem, const Potential& potential, const VectorRef& x) {
  return -c_transform(problem, potential, x);
}

double f_avg(const Problem& problem, const Potential& potential, const VectorRef& x,
             const FieldSpec& spec) {
  const auto& target = problem.target();
  const int n = target.size();
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = score(problem.cost(), target, potential, i, x);
    if (s == -kInf) continue;
    const double u = -s;
    if (!(u > 0.0)) throw DomainError("f_avg: x lies in the active domain");
    sum += spec.weight(i) * std::pow(u, 1.0 - spec.beta) / (1.0 - spec.beta);
  }
  return sum / total_weight(spec, n);
}

FieldTerms off_domain_terms(const Problem& problem, const Potential& potential,
                            const VectorRef& x, const FieldSpec& spec) {
  const auto& target = problem.target();
  const auto& cost = problem.cost();
  const int n = target.size();
  const auto d = x.size();
  const double total = total_weight(spec, n);
  FieldTerms out;
  out.eta = Vector::Zero(d);
  out.integrands = Matrix::Zero(d, n);
  out.directions = Matrix::Zero(d, n);
  for (int i = 0; i < n; ++i) {
    const double s = score(cost, target, potential, i, x);
    if (s == -kInf) continue;
    const double u = -s;
    if (!(u > 0.0)) throw DomainError("eta_off_domain: x lies in the active domain");
    const Vector g = cost.grad_x(x, target.point(i));
    out.directions.col(i) = g;
    out.integrands.col(i) = (spec.weight(i) / total) * std::pow(u, -spec.beta) * g;
    out.eta += out.integrands.col(i);
  }
  return out;
}

Vector eta_off_domain(const Problem& problem, const Potential& potential, const VectorRef& x,
                      const FieldSpec& spec) {
  return off_domain_terms(problem, potential, x, spec).eta;
}

double nu_weight(const Problem& problem, const std::vector<int>& tied, int index,
                 const FieldSpec& spec) {
  const auto& target = problem.target();
  double prod = 1.0;
  for (int k : tied) {
    if (k == index) return 0.0;
    prod *= std::pow((target.point(index) - target.point(k)).norm(), spec.order_of(k));
  }
  return std::min(1.0, prod);
}

FieldTerms cellular_terms(const Problem& problem, const Potential& potential, const VectorRef& x,
                          const std::vector<int>& tied, int anchor, const FieldSpec& spec,
                          double tol_rank) {
  if (std::find(tied.begin(), tied.end(), anchor) == tied.end())
    throw ValidationError("eta_cellular: anchor is not a tied index");
  const auto& target = problem.target();
  const auto& cost = problem.cost();
  const int n = target.size();
  const auto d = x.size();
  const double total = total_weight(spec, n);
  const TangentProjector proj = tangent_projector(cost, target, x, tied, tol_rank);

  FieldTerms out;
  out.tied = tied;
  out.anchor = anchor;
  out.zero_tangent = proj.zero_dimensional();
  out.eta = Vector::Zero(d);
  out.integrands = Matrix::Zero(d, n);
  out.directions = Matrix::Zero(d, 0);

  const double s0 = score(cost, target, potential, anchor, x);
  const Vector g0 = cost.grad_x(x, target.point(anchor));
  std::vector<Vector> dirs;
  for (int y = 0; y < n; ++y) {
    if (std::find(tied.begin(), tied.end(), y) != tied.end()) continue;
    const double sy = score(cost, target, potential, y, x);
    if (sy == -kInf) continue;
    const double gap = std::abs(s0 - sy);
    if (!(gap > 0.0)) throw DomainError("eta_cellular: a non-tied target has zero gap");
    const Vector dir = proj.projector * (cost.grad_x(x, target.point(y)) - g0);
    dirs.push_back(dir);
    if (out.zero_tangent) continue;
    const double nu = nu_weight(problem, tied, y, spec);
    out.integrands.col(y) = (spec.weight(y) / total) * std::pow(gap, -spec.beta) * std::pow(nu, spec.beta) * dir;
    out.eta += out.integrands.col(y);
  }
  out.directions.resize(d, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t k = 0; k < dirs.size(); ++k) out.directions.col(static_cast<Eigen::Index>(k)) = dirs[k];
  return out;
}

FieldTerms cellular_terms(const Problem& problem, const Potential& potential, const VectorRef& x,
                          const FieldSpec& spec, double tie, double tol_rank) {
  const auto sub = subdifferential(problem, potential, x, tie);
  return cellular_terms(problem, potential, x, sub.indices, sub.indices.front(), spec, tol_rank);
}

Vector eta_cellular(const Problem& problem, const Potential& potential, const VectorRef& x,
                    const FieldSpec& spec, double tie, double tol_rank) {
  return cellular_terms(problem, potential, x, spec, tie, tol_rank).eta;
}

Vector tie_residual(const Problem& problem, const Potential& potential, const VectorRef& x,
                    const std::vector<int>& tied) {
  const auto& target = problem.target();
  const double s0 = score(problem.cost(), target, potential, tied.front(), x);
  Vector g(static_cast<Eigen::Index>(tied.size()) - 1);
  for (std::size_t k = 1; k < tied.size(); ++k)
    g[static_cast<Eigen::Index>(k - 1)] = s0 - score(problem.cost(), target, potential, tied[k], x);
  return g;
}

Vector project_to_ties(const Problem& problem, const Potential& potential, const VectorRef& x,
                       const std::vector<int>& tied, double tol, int max_iters) {
  Vector cur = x;
  if (tied.size() < 2) return cur;
  Vector g = tie_residual(problem, potential, cur, tied);
  for (int it = 0; it < max_iters; ++it) {
    const double norm = g.lpNorm<Eigen::Infinity>();
    if (norm <= tol) break;
    // d(s0 - sk)/dx = grad c_k - grad c_0, the cross-difference rows.
    const Matrix jac = cross_diff_gradients(problem.cost(), problem.target(), cur, tied);
    const Vector step = jac.transpose() * (jac * jac.transpose()).completeOrthogonalDecomposition().solve(g);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 20; ++ls, alpha *= 0.5) {
      const Vector trial = cur - alpha * step;
      const Vector tg = tie_residual(problem, potential, trial, tied);
      if (tg.allFinite() && tg.lpNorm<Eigen::Infinity>() < norm) {
        cur = trial;
        g = tg;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return cur;
}

double next_tie_gap(const Problem& problem, const Potential& potential, const VectorRef& x,
                    const std::vector<int>& tied) {
  const auto& target = problem.target();
  const double s0 = score(problem.cost(), target, potential, tied.front(), x);
  double best = kInf;
  for (int y = 0; y < target.size(); ++y) {
    if (std::find(tied.begin(), tied.end(), y) != tied.end()) continue;
    best = std::min(best, s0 - score(problem.cost(), target, potential, y, x));
  }
  return best;
}

}  // namespace semicoupling
