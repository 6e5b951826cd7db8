#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "semicoupling/fields.hpp"
#include "semicoupling/tolerances.hpp"

namespace semicoupling {

class Problem;

struct UHSSample {
  Vector x;
  double field_norm = 0.0;
  /// Sum of the weighted integrand norms; the field norm is at most this.
  double integrand_norm = 0.0;
  /// field_norm / integrand_norm, the empirical constant of property (C).
  double ratio = 0.0;
  /// Distance from the origin to the hull of the field directions.
  double hull_distance = 0.0;
  /// Largest direction norm, for the bound ratio >= hull_distance / this.
  double max_direction_norm = 0.0;
  bool passed = false;
};

struct UHSReport {
  std::string region;
  FieldSpec spec;
  std::vector<UHSSample> samples;
  double min_field_norm = 0.0;
  double min_ratio = 0.0;
  double min_hull_distance = 0.0;
  std::size_t failures = 0;
  /// Failing sample with the smallest field norm.
  std::optional<std::size_t> worst;
  /// Samples where ratio < hull_distance / max_direction_norm (up to rounding).
  std::size_t property_c_violations = 0;
  bool passed() const { return failures == 0; }
};

/// A sample fails when its hull distance or its field norm is at most
/// eps_uhs. Off-domain samples must satisfy u_min > 0; cellular samples
/// must lie in Z_j - Z_{j+1}. Throws ValidationError on an empty sample set
/// and DomainError on a sample outside the region.
UHSReport uhs_check(const Matrix& samples, const Problem& problem, const Potential& potential,
                    const FieldSpec& spec, const Tolerances& tolerances);

/// Lattice nodes (per_axis along each axis, faces included) lying in the
/// field's region: X - A, or Z_j - Z_{j+1}.
Matrix region_samples(const Problem& problem, const Potential& potential, const FieldSpec& spec,
                      const Tolerances& tolerances, int per_axis);

std::string region_name(const FieldSpec& spec);

}  // namespace semicoupling
