#include "semicoupling/cost.hpp"

#include <cmath>

#include "semicoupling/error.hpp"

namespace semicoupling {

std::string to_string(CostKind kind) {
  switch (kind) {
    case CostKind::quadratic:
      return "quadratic";
    case CostKind::log_repulsive:
      return "log_repulsive";
    case CostKind::user_supplied:
      return "user_supplied";
  }
  return "unknown";
}

double QuadraticCost::eval(const VectorRef& x, const VectorRef& y) const {
  return 0.5 * (x - y).squaredNorm();
}

Vector QuadraticCost::grad_x(const VectorRef& x, const VectorRef& y) const { return x - y; }

Matrix QuadraticCost::hess_x(const VectorRef& x, const VectorRef&) const {
  return Matrix::Identity(x.size(), x.size());
}

LogRepulsiveCost::LogRepulsiveCost(double offset, double pole_radius)
    : offset_(offset), pole_radius_(pole_radius) {
  if (!std::isfinite(offset_)) throw ValidationError("log_repulsive cost: offset is not finite");
}

bool LogRepulsiveCost::in_domain(const VectorRef& x, const VectorRef& y) const {
  return (x - y).norm() > pole_radius_;
}

double LogRepulsiveCost::eval(const VectorRef& x, const VectorRef& y) const {
  const double r = (x - y).norm();
  if (!(r > pole_radius_)) throw DomainError("log_repulsive cost: evaluated at its pole x = y");
  return offset_ - std::log(r);
}

Vector LogRepulsiveCost::grad_x(const VectorRef& x, const VectorRef& y) const {
  const Vector v = x - y;
  const double r2 = v.squaredNorm();
  if (!(std::sqrt(r2) > pole_radius_)) throw DomainError("log_repulsive cost: gradient at its pole");
  return -v / r2;
}

Matrix LogRepulsiveCost::hess_x(const VectorRef& x, const VectorRef& y) const {
  const Vector v = x - y;
  const double r2 = v.squaredNorm();
  if (!(std::sqrt(r2) > pole_radius_)) throw DomainError("log_repulsive cost: Hessian at its pole");
  const auto d = x.size();
  return -Matrix::Identity(d, d) / r2 + 2.0 * v * v.transpose() / (r2 * r2);
}

FunctionCost::FunctionCost(EvalFn eval, GradFn grad, HessFn hess, DomainFn domain, double fd_step)
    : eval_(std::move(eval)),
      grad_(std::move(grad)),
      hess_(std::move(hess)),
      domain_(std::move(domain)),
      fd_step_(fd_step) {
  if (!eval_) throw ValidationError("user cost: eval callable is empty");
}

bool FunctionCost::in_domain(const VectorRef& x, const VectorRef& y) const {
  return domain_ ? domain_(x, y) : true;
}

double FunctionCost::eval(const VectorRef& x, const VectorRef& y) const {
  if (domain_ && !domain_(x, y)) throw DomainError("user cost: evaluated outside its domain");
  return eval_(x, y);
}

Vector FunctionCost::grad_x(const VectorRef& x, const VectorRef& y) const {
  if (grad_) return grad_(x, y);
  return finite_difference_grad_x(*this, x, y, fd_step_);
}

Matrix FunctionCost::hess_x(const VectorRef& x, const VectorRef& y) const {
  if (hess_) return hess_(x, y);
  const auto d = x.size();
  Matrix h(d, d);
  Vector xp = x;
  for (Eigen::Index a = 0; a < d; ++a) {
    xp[a] = x[a] + fd_step_;
    const Vector gp = grad_x(xp, y);
    xp[a] = x[a] - fd_step_;
    const Vector gm = grad_x(xp, y);
    xp[a] = x[a];
    h.col(a) = (gp - gm) / (2.0 * fd_step_);
  }
  return 0.5 * (h + h.transpose());
}

CostPtr make_quadratic_cost() { return std::make_shared<QuadraticCost>(); }

CostPtr make_log_repulsive_cost(double offset) { return std::make_shared<LogRepulsiveCost>(offset); }

Vector finite_difference_grad_x(const CostModel& cost, const VectorRef& x, const VectorRef& y,
                                double step) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    xp[a] = x[a] + step;
    const double fp = cost.eval(xp, y);
    xp[a] = x[a] - step;
    const double fm = cost.eval(xp, y);
    xp[a] = x[a];
    g[a] = (fp - fm) / (2.0 * step);
  }
  return g;
}

Vector finite_difference_grad_y(const CostModel& cost, const VectorRef& x, const VectorRef& y,
                                double step) {
  Vector g(y.size());
  Vector yp = y;
  for (Eigen::Index a = 0; a < y.size(); ++a) {
    yp[a] = y[a] + step;
    const double fp = cost.eval(x, yp);
    yp[a] = y[a] - step;
    const double fm = cost.eval(x, yp);
    yp[a] = y[a];
    g[a] = (fp - fm) / (2.0 * step);
  }
  return g;
}

}  // namespace semicoupling
