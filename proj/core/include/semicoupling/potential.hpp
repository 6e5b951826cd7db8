#pragma once

#include <optional>
#include <vector>

#include "semicoupling/linalg.hpp"

namespace semicoupling {

class Problem;

/// Dual potential: one value per target point, plus an optional cache of
/// its c-transform at the source cell centers.
class Potential {
 public:
  Potential() = default;
  explicit Potential(Vector psi);

  const Vector& psi() const noexcept { return psi_; }
  double operator[](int i) const { return psi_[i]; }
  int size() const noexcept { return static_cast<int>(psi_.size()); }

  const std::optional<std::vector<double>>& phi_field() const noexcept { return phi_field_; }
  /// Fills the c-transform cache on the problem's grid.
  void cache_phi(const Problem& problem);

 private:
  Vector psi_;
  std::optional<std::vector<double>> phi_field_;
};

}  // namespace semicoupling
