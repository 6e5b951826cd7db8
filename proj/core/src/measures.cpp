#include "semicoupling/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "semicoupling/error.hpp"

namespace semicoupling {

SourceMeasure::SourceMeasure(Grid grid, std::vector<double> density, DensityFunction sampler)
    : grid_(std::move(grid)), density_(std::move(density)), sampler_(std::move(sampler)) {
  if (density_.size() != grid_.size())
    throw ValidationError("source: " + std::to_string(density_.size()) + " density samples for " +
                          std::to_string(grid_.size()) + " cells");
  double sum = 0.0;
  double top = 0.0;
  for (std::size_t i = 0; i < density_.size(); ++i) {
    const double v = density_[i];
    if (!std::isfinite(v) || v < 0.0) throw DensitySampleError(i, v);
    sum += v;
    top = std::max(top, v);
  }
  total_mass_ = sum * grid_.cell_volume();
  max_cell_mass_ = top * grid_.cell_volume();
}

SourceMeasure make_source(const Box& box, const std::vector<int>& resolution,
                          const DensityFunction& density) {
  Grid grid(box, resolution);
  std::vector<double> samples(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    samples[i] = density(grid.center(i));
    if (!std::isfinite(samples[i]) || samples[i] < 0.0) throw DensitySampleError(i, samples[i]);
  }
  return SourceMeasure(std::move(grid), std::move(samples), density);
}

TargetMeasure::TargetMeasure(Matrix points, std::vector<double> masses,
                             std::optional<std::vector<double>> quad_weights)
    : points_(std::move(points)), masses_(std::move(masses)), quad_weights_(std::move(quad_weights)) {
  const int n = static_cast<int>(points_.cols());
  if (n == 0) throw ValidationError("target: no points");
  if (static_cast<int>(masses_.size()) != n)
    throw ValidationError("target: " + std::to_string(masses_.size()) + " masses for " +
                          std::to_string(n) + " points");
  if (!points_.allFinite()) throw ValidationError("target: non-finite coordinate");
  for (int i = 0; i < n; ++i) {
    if (!(masses_[i] > 0.0) || !std::isfinite(masses_[i]))
      throw ValidationError("target: mass " + std::to_string(i) + " is not positive");
    total_mass_ += masses_[i];
  }
  if (quad_weights_) {
    if (static_cast<int>(quad_weights_->size()) != n)
      throw ValidationError("target: quadrature weight count differs from point count");
    for (double w : *quad_weights_)
      if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("target: quadrature weight is not positive");
  }
  if (n > 1 && !(min_pairwise_distance() > 0.0)) throw ValidationError("target: points are not distinct");
}

std::vector<double> TargetMeasure::averaging_weights() const {
  if (quad_weights_) return *quad_weights_;
  return std::vector<double>(static_cast<std::size_t>(size()), 1.0);
}

double TargetMeasure::min_pairwise_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j) best = std::min(best, (points_.col(i) - points_.col(j)).norm());
  return best;
}

}  // namespace semicoupling
