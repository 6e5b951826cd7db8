#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "semicoupling/linalg.hpp"

namespace semicoupling {

enum class CostKind { quadratic, log_repulsive, user_supplied };

std::string to_string(CostKind kind);

/// A transport cost c(x, y) with derivatives in the source variable.
///
/// Implementations are immutable and may be shared between threads.
/// Evaluating outside the declared domain throws DomainError.
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual CostKind kind() const noexcept = 0;
  virtual std::vector<double> params() const { return {}; }

  virtual bool in_domain(const VectorRef& x, const VectorRef& y) const = 0;
  virtual double eval(const VectorRef& x, const VectorRef& y) const = 0;
  virtual Vector grad_x(const VectorRef& x, const VectorRef& y) const = 0;
  virtual Matrix hess_x(const VectorRef& x, const VectorRef& y) const = 0;
};

using CostPtr = std::shared_ptr<const CostModel>;

/// c(x, y) = |x - y|^2 / 2.
class QuadraticCost final : public CostModel {
 public:
  CostKind kind() const noexcept override { return CostKind::quadratic; }
  bool in_domain(const VectorRef&, const VectorRef&) const override { return true; }
  double eval(const VectorRef& x, const VectorRef& y) const override;
  Vector grad_x(const VectorRef& x, const VectorRef& y) const override;
  Matrix hess_x(const VectorRef& x, const VectorRef& y) const override;
};

/// c(x, y) = -log|x - y| + offset, with a pole on the diagonal. The offset
/// is chosen by the caller so that c >= 0 on the region of interest.
class LogRepulsiveCost final : public CostModel {
 public:
  explicit LogRepulsiveCost(double offset, double pole_radius = 1e-12);

  CostKind kind() const noexcept override { return CostKind::log_repulsive; }
  std::vector<double> params() const override { return {offset_}; }
  double offset() const noexcept { return offset_; }

  bool in_domain(const VectorRef& x, const VectorRef& y) const override;
  double eval(const VectorRef& x, const VectorRef& y) const override;
  Vector grad_x(const VectorRef& x, const VectorRef& y) const override;
  Matrix hess_x(const VectorRef& x, const VectorRef& y) const override;

 private:
  double offset_;
  double pole_radius_;
};

/// Cost assembled from callables. Missing derivatives fall back to central
/// finite differences of `eval`.
class FunctionCost final : public CostModel {
 public:
  using EvalFn = std::function<double(const VectorRef&, const VectorRef&)>;
  using GradFn = std::function<Vector(const VectorRef&, const VectorRef&)>;
  using HessFn = std::function<Matrix(const VectorRef&, const VectorRef&)>;
  using DomainFn = std::function<bool(const VectorRef&, const VectorRef&)>;

  explicit FunctionCost(EvalFn eval, GradFn grad = {}, HessFn hess = {}, DomainFn domain = {},
                        double fd_step = 1e-5);

  CostKind kind() const noexcept override { return CostKind::user_supplied; }
  bool in_domain(const VectorRef& x, const VectorRef& y) const override;
  double eval(const VectorRef& x, const VectorRef& y) const override;
  Vector grad_x(const VectorRef& x, const VectorRef& y) const override;
  Matrix hess_x(const VectorRef& x, const VectorRef& y) const override;

 private:
  EvalFn eval_;
  GradFn grad_;
  HessFn hess_;
  DomainFn domain_;
  double fd_step_;
};

CostPtr make_quadratic_cost();
CostPtr make_log_repulsive_cost(double offset);

/// Central-difference gradient of x -> c(x, y).
Vector finite_difference_grad_x(const CostModel& cost, const VectorRef& x, const VectorRef& y,
                                double step);
/// Central-difference gradient of y -> c(x, y).
Vector finite_difference_grad_y(const CostModel& cost, const VectorRef& x, const VectorRef& y,
                                double step);

}  // namespace semicoupling
