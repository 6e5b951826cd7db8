#pragma once

#include <string>
#include <vector>

#include "semicoupling/linalg.hpp"
#include "semicoupling/potential.hpp"

namespace semicoupling {

class Problem;

enum class FlowMode { off_domain, cellular };
std::string to_string(FlowMode mode);
FlowMode flow_mode_from_string(const std::string& name);

/// Averaged blow-up field settings.
struct FieldSpec {
  FlowMode mode = FlowMode::off_domain;
  /// Blow-up exponent, at least 2.
  double beta = 2.0;
  /// Averaging weights per target; empty means the target's own weights.
  std::vector<double> weights;
  /// Cellular mode: the flow runs on Z_j - Z_{j+1}.
  int stratum = 1;
  /// Zero order ord(y) per target for the nu weights; empty means all 1.
  std::vector<double> order;

  void validate(int targets) const;
  double weight(int i) const;
  double order_of(int i) const;
};

/// u_min(x) = min_i (c(x, y_i) - psi_i), positive exactly off the active set.
double u_min(const Problem& problem, const Potential& potential, const VectorRef& x);

/// Weighted mean of f_y = u_y^{1-beta} / (1 - beta). Throws DomainError
/// unless u_min(x) > 0.
double f_avg(const Problem& problem, const Potential& potential, const VectorRef& x,
             const FieldSpec& spec);

/// A field with its per-target integrands (already weighted, so the field is
/// their sum) and the undamped directions whose hull decides UHS.
struct FieldTerms {
  Vector eta;
  Matrix integrands;
  Matrix directions;
  /// Cellular mode: tied set and anchor index.
  std::vector<int> tied;
  int anchor = -1;
  /// Cellular mode: the tangent space is a point, so the field is zero.
  bool zero_tangent = false;
};

/// Weighted mean of u_i^{-beta} grad_x c(x, y_i), the gradient of f_avg.
/// nu is identically 1 off the active set.
FieldTerms off_domain_terms(const Problem& problem, const Potential& potential,
                            const VectorRef& x, const FieldSpec& spec);
Vector eta_off_domain(const Problem& problem, const Potential& potential, const VectorRef& x,
                      const FieldSpec& spec);

/// nu_x(y) = min(1, prod_{y0 tied} d(y, y0)^{ord(y0)}).
double nu_weight(const Problem& problem, const std::vector<int>& tied, int index,
                 const FieldSpec& spec);

/// Projected cellular field for a given tied set, with `anchor` one of its
/// members (any choice gives the same field on the tie variety). Throws
/// DomainError when a non-tied target has zero gap.
FieldTerms cellular_terms(const Problem& problem, const Potential& potential, const VectorRef& x,
                          const std::vector<int>& tied, int anchor, const FieldSpec& spec,
                          double tol_rank);
/// Same, with the tied set read off at x within `tie`.
FieldTerms cellular_terms(const Problem& problem, const Potential& potential, const VectorRef& x,
                          const FieldSpec& spec, double tie, double tol_rank);
Vector eta_cellular(const Problem& problem, const Potential& potential, const VectorRef& x,
                    const FieldSpec& spec, double tie, double tol_rank);

/// Tie equations g_k = s_anchor - s_k for the tied set and their Jacobian rows.
Vector tie_residual(const Problem& problem, const Potential& potential, const VectorRef& x,
                    const std::vector<int>& tied);
/// Gauss-Newton projection onto the tie variety of `tied`.
Vector project_to_ties(const Problem& problem, const Potential& potential, const VectorRef& x,
                       const std::vector<int>& tied, double tol, int max_iters = 30);
/// Smallest gap s_anchor - s_y over targets outside `tied`; +inf when none.
double next_tie_gap(const Problem& problem, const Potential& potential, const VectorRef& x,
                    const std::vector<int>& tied);

}  // namespace semicoupling
