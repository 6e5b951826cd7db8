#pragma once

#include <cstddef>
#include <vector>

#include "semicoupling/linalg.hpp"

namespace semicoupling {

/// Axis-aligned box [lo, hi] in R^d.
struct Box {
  Vector lo;
  Vector hi;

  int dimension() const noexcept { return static_cast<int>(lo.size()); }
  Vector extent() const { return hi - lo; }
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const VectorRef& x) const;
  /// The 2^d corner points, as columns.
  Matrix corners() const;
};

/// Regular cell-centered grid over a box. Flat indices run with axis 0
/// fastest.
class Grid {
 public:
  Grid(Box box, std::vector<int> resolution);

  const Box& box() const noexcept { return box_; }
  int dimension() const noexcept { return box_.dimension(); }
  const std::vector<int>& resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept { return size_; }
  const Vector& spacing() const noexcept { return spacing_; }
  double max_spacing() const { return spacing_.maxCoeff(); }
  double cell_volume() const noexcept { return cell_volume_; }

  /// Cell centers, one column per flat index.
  const Matrix& centers() const noexcept { return centers_; }
  auto center(std::size_t flat) const { return centers_.col(static_cast<Eigen::Index>(flat)); }

  std::vector<int> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::vector<int>& index) const;

  /// Flat indices of the cells sharing a face, edge or corner with `flat`
  /// (the 3^d - 1 neighborhood, clipped at the boundary).
  std::vector<std::size_t> neighbors(std::size_t flat) const;

  /// Same box with every axis resolution replaced by `per_axis`.
  Grid with_resolution(int per_axis) const;

 private:
  Box box_;
  std::vector<int> resolution_;
  std::size_t size_ = 0;
  Vector spacing_;
  double cell_volume_ = 0.0;
  Matrix centers_;
};

}  // namespace semicoupling
