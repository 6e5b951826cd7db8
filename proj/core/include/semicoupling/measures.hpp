#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "semicoupling/grid.hpp"

namespace semicoupling {

using DensityFunction = std::function<double(const VectorRef&)>;

/// Nonnegative density sampled at the cell centers of a regular grid.
/// Integrals over the source become midpoint sums over the cells.
class SourceMeasure {
 public:
  SourceMeasure(Grid grid, std::vector<double> density, DensityFunction sampler = {});

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<double>& density() const noexcept { return density_; }
  double cell_volume() const noexcept { return grid_.cell_volume(); }
  /// Mass of one cell, density times cell volume.
  double cell_mass(std::size_t flat) const { return density_[flat] * grid_.cell_volume(); }
  double total_mass() const noexcept { return total_mass_; }
  double max_cell_mass() const noexcept { return max_cell_mass_; }
  /// The density function the samples came from, when known.
  const DensityFunction& sampler() const noexcept { return sampler_; }

 private:
  Grid grid_;
  std::vector<double> density_;
  DensityFunction sampler_;
  double total_mass_ = 0.0;
  double max_cell_mass_ = 0.0;
};

/// Samples `density` at the cell centers. Throws DensitySampleError naming
/// the first cell with a negative or non-finite value.
SourceMeasure make_source(const Box& box, const std::vector<int>& resolution,
                          const DensityFunction& density);

/// Finite weighted point set. `quad_weights`, when present, are the
/// quadrature weights of a curve discretization and replace the uniform
/// weights in target averages.
class TargetMeasure {
 public:
  TargetMeasure(Matrix points, std::vector<double> masses,
                std::optional<std::vector<double>> quad_weights = std::nullopt);

  int dimension() const noexcept { return static_cast<int>(points_.rows()); }
  int size() const noexcept { return static_cast<int>(points_.cols()); }
  const Matrix& points() const noexcept { return points_; }
  auto point(int i) const { return points_.col(i); }
  const std::vector<double>& masses() const noexcept { return masses_; }
  double total_mass() const noexcept { return total_mass_; }
  const std::optional<std::vector<double>>& quad_weights() const noexcept { return quad_weights_; }
  /// Averaging weights: the quadrature weights, or all ones.
  std::vector<double> averaging_weights() const;
  double min_pairwise_distance() const;

 private:
  Matrix points_;
  std::vector<double> masses_;
  std::optional<std::vector<double>> quad_weights_;
  double total_mass_ = 0.0;
};

}  // namespace semicoupling
