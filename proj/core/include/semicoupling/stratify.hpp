#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "semicoupling/cost.hpp"
#include "semicoupling/grid.hpp"
#include "semicoupling/measures.hpp"
#include "semicoupling/potential.hpp"

namespace semicoupling {

class Problem;
struct Tolerances;

/// Per-cell stratification data at the cell center.
struct StratumCell {
  bool active = false;
  /// Size of the tied set; 0 for inactive cells.
  int cardinality = 0;
  /// Span dimension of the cross-difference gradients.
  int rank = 0;
  /// Highest j with the cell in Z_j: 0 inactive, rank + 1 otherwise.
  int label = 0;
  /// Largest cross-difference gradient norm, 0 below two ties.
  double max_cross_norm = 0.0;
};

class StratumField {
 public:
  StratumField(Grid grid, std::vector<StratumCell> cells, double tie, double tol_rank);

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<StratumCell>& cells() const noexcept { return cells_; }
  const StratumCell& cell(std::size_t flat) const { return cells_[flat]; }
  double tie() const noexcept { return tie_; }
  double tol_rank() const noexcept { return tol_rank_; }
  /// Largest label present.
  int max_label() const noexcept { return max_label_; }
  /// Number of cells in Z_j (label >= j); Z_0 is the whole grid.
  std::size_t count(int j) const;
  /// Number of cells with label exactly j, that is Z_j - Z_{j+1}.
  std::size_t count_exact(int j) const;
  bool nested() const;

 private:
  Grid grid_;
  std::vector<StratumCell> cells_;
  double tie_;
  double tol_rank_;
  int max_label_ = 0;
};

StratumField stratify(const Grid& grid, const CostModel& cost, const TargetMeasure& target,
                      const Potential& potential, double tie, double tol_rank);
/// Stratifies the problem grid with the resolved tie tolerance.
StratumField stratify(const Problem& problem, const Potential& potential,
                      const Tolerances& tolerances);

/// Stratifications of the problem geometry at several resolutions. The tie
/// tolerance scales with the spacing: the grid default when tol_tie is unset,
/// otherwise tol_tie * h / h_problem.
std::vector<StratumField> stratify_resolutions(const Problem& problem, const Potential& potential,
                                               const Tolerances& tolerances,
                                               const std::vector<int>& resolutions);

/// Connected set of cells in Z_j, connectivity over the 3^d - 1 neighborhood.
struct Cluster {
  std::vector<std::size_t> cells;
  Vector centroid;
};

std::vector<Cluster> clusters(const StratumField& field, int label);

struct DimensionEstimate {
  int stratum = 0;
  std::vector<double> spacings;
  std::vector<std::size_t> counts;
  /// Least-squares slope of log N against log(1/h); unset when Z_j is empty
  /// at some resolution.
  std::optional<double> dimension;
  /// Upper bound d - j + 1.
  double bound = 0.0;
  bool violates = false;
};

struct DimensionAudit {
  std::vector<DimensionEstimate> estimates;
  /// Minimum over Z_2 cells of the largest cross-difference gradient norm,
  /// at the finest resolution. Unset when Z_2 is empty.
  std::optional<double> closedness_witness;
  double noise = 0.25;
  bool passed() const;
  const DimensionEstimate* estimate(int stratum) const;
};

/// Box-counting audit of every Z_j, j >= 1, across the given fields.
/// Fields must cover the same box.
DimensionAudit dimension_audit(const std::vector<StratumField>& fields, double noise = 0.25);

}  // namespace semicoupling
