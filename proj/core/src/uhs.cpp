#include "semicoupling/uhs.hpp"

#include <algorithm>
#include <limits>

#include "semicoupling/error.hpp"
#include "semicoupling/hull.hpp"
#include "semicoupling/problem.hpp"
#include "semicoupling/retraction.hpp"
#include "semicoupling/singularity.hpp"

namespace semicoupling {

std::string region_name(const FieldSpec& spec) {
  if (spec.mode == FlowMode::off_domain) return "X-A";
  return "Z_" + std::to_string(spec.stratum) + "-Z_" + std::to_string(spec.stratum + 1);
}

UHSReport uhs_check(const Matrix& samples, const Problem& problem, const Potential& potential,
                    const FieldSpec& spec, const Tolerances& tolerances) {
  if (samples.cols() == 0) throw ValidationError("uhs_check: empty sample set");
  spec.validate(problem.target().size());
  const double tie = spec.mode == FlowMode::cellular ? tolerances.tie_tolerance(problem, potential) : 0.0;

  UHSReport report;
  report.region = region_name(spec);
  report.spec = spec;
  report.min_field_norm = std::numeric_limits<double>::infinity();
  report.min_ratio = std::numeric_limits<double>::infinity();
  report.min_hull_distance = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < samples.cols(); ++k) {
    const Vector x = samples.col(k);
    FieldTerms terms;
    if (spec.mode == FlowMode::off_domain) {
      if (!(u_min(problem, potential, x) > 0.0)) throw DomainError("uhs_check: sample lies in the active domain");
      terms = off_domain_terms(problem, potential, x, spec);
    } else {
      const auto sub = subdifferential(problem, potential, x, tie);
      const int rank = matrix_rank(cross_diff_gradients(problem.cost(), problem.target(), x, sub.indices),
                                   tolerances.tol_rank);
      if (rank != spec.stratum - 1) throw DomainError("uhs_check: sample is not in " + report.region);
      terms = cellular_terms(problem, potential, x, sub.indices, sub.indices.front(), spec, tolerances.tol_rank);
    }
    UHSSample s;
    s.x = x;
    s.field_norm = terms.eta.norm();
    s.integrand_norm = terms.integrands.colwise().norm().sum();
    s.ratio = s.integrand_norm > 0.0 ? std::min(1.0, s.field_norm / s.integrand_norm) : 0.0;
    if (terms.directions.cols() > 0) {
      s.hull_distance = hull_distance(terms.directions);
      s.max_direction_norm = terms.directions.colwise().norm().maxCoeff();
    }
    s.passed = s.hull_distance > tolerances.eps_uhs && s.field_norm >= tolerances.eps_uhs;
    if (s.max_direction_norm > 0.0 && s.ratio < s.hull_distance / s.max_direction_norm - 1e-9)
      ++report.property_c_violations;

    report.min_field_norm = std::min(report.min_field_norm, s.field_norm);
    report.min_ratio = std::min(report.min_ratio, s.ratio);
    report.min_hull_distance = std::min(report.min_hull_distance, s.hull_distance);
    if (!s.passed) {
      ++report.failures;
      const auto idx = static_cast<std::size_t>(k);
      if (!report.worst || s.field_norm < report.samples[*report.worst].field_norm) report.worst = idx;
    }
    report.samples.push_back(std::move(s));
  }
  return report;
}

Matrix region_samples(const Problem& problem, const Potential& potential, const FieldSpec& spec,
                      const Tolerances& tolerances, int per_axis) {
  const Matrix nodes = lattice(problem.grid().box(), {per_axis});
  const double tie = spec.mode == FlowMode::cellular ? tolerances.tie_tolerance(problem, potential) : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < nodes.cols(); ++k) {
    const Vector x = nodes.col(k);
    const double u = u_min(problem, potential, x);
    if (spec.mode == FlowMode::off_domain) {
      if (u > 0.0) keep.push_back(k);
      continue;
    }
    if (!(u <= 0.0)) continue;
    const auto sub = subdifferential(problem, potential, x, tie);
    const int rank = matrix_rank(cross_diff_gradients(problem.cost(), problem.target(), x, sub.indices),
                                 tolerances.tol_rank);
    if (rank == spec.stratum - 1) keep.push_back(k);
  }
  Matrix out(nodes.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = nodes.col(keep[k]);
  return out;
}

}  // namespace semicoupling
