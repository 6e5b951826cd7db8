#include "semicoupling/grid.hpp"

#include <cmath>

#include "semicoupling/error.hpp"

namespace semicoupling {

bool Box::contains(const VectorRef& x) const {
  return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

Matrix Box::corners() const {
  const int d = dimension();
  const int count = 1 << d;
  Matrix out(d, count);
  for (int c = 0; c < count; ++c) {
    for (int a = 0; a < d; ++a) out(a, c) = (c >> a) & 1 ? hi[a] : lo[a];
  }
  return out;
}

Grid::Grid(Box box, std::vector<int> resolution) : box_(std::move(box)), resolution_(std::move(resolution)) {
  const int d = box_.dimension();
  if (d < 1) throw ValidationError("grid: box has dimension 0");
  if (box_.hi.size() != d) throw ValidationError("grid: box corners differ in dimension");
  if (static_cast<int>(resolution_.size()) == 1 && d > 1) resolution_.assign(d, resolution_[0]);
  if (static_cast<int>(resolution_.size()) != d)
    throw ValidationError("grid: resolution has " + std::to_string(resolution_.size()) +
                          " entries for dimension " + std::to_string(d));
  spacing_.resize(d);
  size_ = 1;
  cell_volume_ = 1.0;
  for (int a = 0; a < d; ++a) {
    if (resolution_[a] < 2) throw ValidationError("grid: resolution must be >= 2 on every axis");
    if (!(box_.hi[a] > box_.lo[a])) throw ValidationError("grid: box is empty along an axis");
    spacing_[a] = (box_.hi[a] - box_.lo[a]) / resolution_[a];
    size_ *= static_cast<std::size_t>(resolution_[a]);
    cell_volume_ *= spacing_[a];
  }
  centers_.resize(d, static_cast<Eigen::Index>(size_));
  std::vector<int> idx(d, 0);
  for (std::size_t f = 0; f < size_; ++f) {
    for (int a = 0; a < d; ++a) centers_(a, static_cast<Eigen::Index>(f)) = box_.lo[a] + (idx[a] + 0.5) * spacing_[a];
    for (int a = 0; a < d; ++a) {
      if (++idx[a] < resolution_[a]) break;
      idx[a] = 0;
    }
  }
}

std::vector<int> Grid::unflatten(std::size_t flat) const {
  std::vector<int> idx(resolution_.size());
  for (std::size_t a = 0; a < resolution_.size(); ++a) {
    idx[a] = static_cast<int>(flat % resolution_[a]);
    flat /= resolution_[a];
  }
  return idx;
}

std::size_t Grid::flatten(const std::vector<int>& index) const {
  std::size_t flat = 0;
  for (std::size_t a = resolution_.size(); a-- > 0;) flat = flat * resolution_[a] + index[a];
  return flat;
}

std::vector<std::size_t> Grid::neighbors(std::size_t flat) const {
  const int d = dimension();
  const auto base = unflatten(flat);
  std::vector<std::size_t> out;
  int combos = 1;
  for (int a = 0; a < d; ++a) combos *= 3;
  std::vector<int> idx(d);
  for (int c = 0; c < combos; ++c) {
    int code = c;
    bool self = true;
    bool inside = true;
    for (int a = 0; a < d; ++a) {
      const int off = code % 3 - 1;
      code /= 3;
      if (off != 0) self = false;
      idx[a] = base[a] + off;
      if (idx[a] < 0 || idx[a] >= resolution_[a]) inside = false;
    }
    if (!self && inside) out.push_back(flatten(idx));
  }
  return out;
}

Grid Grid::with_resolution(int per_axis) const {
  return Grid(box_, std::vector<int>(resolution_.size(), per_axis));
}

}  // namespace semicoupling
