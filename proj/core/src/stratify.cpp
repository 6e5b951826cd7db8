#include "semicoupling/stratify.hpp"

#include <algorithm>
#include <cmath>

#include "semicoupling/error.hpp"
#include "semicoupling/problem.hpp"
#include "semicoupling/singularity.hpp"
#include "semicoupling/tolerances.hpp"
#include "semicoupling/transform.hpp"

namespace semicoupling {

StratumField::StratumField(Grid grid, std::vector<StratumCell> cells, double tie, double tol_rank)
    : grid_(std::move(grid)), cells_(std::move(cells)), tie_(tie), tol_rank_(tol_rank) {
  if (cells_.size() != grid_.size()) throw ValidationError("StratumField: cell count mismatch");
  for (const auto& c : cells_) max_label_ = std::max(max_label_, c.label);
}

std::size_t StratumField::count(int j) const {
  if (j <= 0) return cells_.size();
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [j](const StratumCell& c) { return c.label >= j; }));
}

std::size_t StratumField::count_exact(int j) const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [j](const StratumCell& c) { return c.label == j; }));
}

bool StratumField::nested() const {
  for (const auto& c : cells_) {
    if (c.active != (c.label >= 1)) return false;
    if (c.active && c.label != c.rank + 1) return false;
    if (c.rank > std::max(0, c.cardinality - 1) || c.rank > grid_.dimension()) return false;
  }
  return true;
}

StratumField stratify(const Grid& grid, const CostModel& cost, const TargetMeasure& target,
                      const Potential& potential, double tie, double tol_rank) {
  std::vector<StratumCell> cells(grid.size());
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    const auto x = grid.center(flat);
    const CellAssignment assign = cell_assignment(cost, target, potential, x, tie);
    StratumCell& c = cells[flat];
    c.active = assign.active;
    if (!c.active) continue;
    c.cardinality = static_cast<int>(assign.indices.size());
    if (c.cardinality >= 2) {
      const Matrix rows = cross_diff_gradients(cost, target, x, assign.indices);
      c.rank = matrix_rank(rows, tol_rank);
      c.max_cross_norm = rows.rowwise().norm().maxCoeff();
    }
    c.label = c.rank + 1;
  }
  return StratumField(grid, std::move(cells), tie, tol_rank);
}

StratumField stratify(const Problem& problem, const Potential& potential,
                      const Tolerances& tolerances) {
  return stratify(problem.grid(), problem.cost(), problem.target(), potential,
                  tolerances.tie_tolerance(problem, potential), tolerances.tol_rank);
}

std::vector<StratumField> stratify_resolutions(const Problem& problem, const Potential& potential,
                                               const Tolerances& tolerances,
                                               const std::vector<int>& resolutions) {
  std::vector<StratumField> out;
  out.reserve(resolutions.size());
  const double h0 = problem.grid().max_spacing();
  for (int res : resolutions) {
    Grid grid = problem.grid().with_resolution(res);
    const double tie =
        tolerances.tol_tie
            ? *tolerances.tol_tie * grid.max_spacing() / h0
            : default_tie_tolerance(grid, problem.cost(), problem.target(), potential, tolerances.tie_scale);
    out.push_back(stratify(grid, problem.cost(), problem.target(), potential, tie, tolerances.tol_rank));
  }
  return out;
}

std::vector<Cluster> clusters(const StratumField& field, int label) {
  const Grid& grid = field.grid();
  std::vector<char> seen(grid.size(), 0);
  std::vector<Cluster> out;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < grid.size(); ++start) {
    if (seen[start] || field.cell(start).label < label) continue;
    Cluster cl;
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      cl.cells.push_back(cur);
      for (std::size_t nb : grid.neighbors(cur)) {
        if (seen[nb] || field.cell(nb).label < label) continue;
        seen[nb] = 1;
        stack.push_back(nb);
      }
    }
    std::sort(cl.cells.begin(), cl.cells.end());
    cl.centroid = Vector::Zero(grid.dimension());
    for (std::size_t c : cl.cells) cl.centroid += grid.center(c);
    cl.centroid /= static_cast<double>(cl.cells.size());
    out.push_back(std::move(cl));
  }
  return out;
}

bool DimensionAudit::passed() const {
  return std::none_of(estimates.begin(), estimates.end(),
                      [](const DimensionEstimate& e) { return e.violates; });
}

const DimensionEstimate* DimensionAudit::estimate(int stratum) const {
  for (const auto& e : estimates)
    if (e.stratum == stratum) return &e;
  return nullptr;
}

DimensionAudit dimension_audit(const std::vector<StratumField>& fields, double noise) {
  DimensionAudit audit;
  audit.noise = noise;
  if (fields.empty()) return audit;
  const int d = fields.front().grid().dimension();
  int top = 0;
  for (const auto& f : fields) top = std::max(top, f.max_label());

  for (int j = 1; j <= top; ++j) {
    DimensionEstimate est;
    est.stratum = j;
    est.bound = static_cast<double>(d - j + 1);
    bool all_nonempty = true;
    for (const auto& f : fields) {
      est.spacings.push_back(f.grid().max_spacing());
      est.counts.push_back(f.count(j));
      if (est.counts.back() == 0) all_nonempty = false;
    }
    if (all_nonempty && fields.size() >= 2) {
      const std::size_t m = fields.size();
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t k = 0; k < m; ++k) {
        const double lx = -std::log(est.spacings[k]);
        const double ly = std::log(static_cast<double>(est.counts[k]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
      }
      const double denom = static_cast<double>(m) * sxx - sx * sx;
      if (denom > 0.0) {
        est.dimension = (static_cast<double>(m) * sxy - sx * sy) / denom;
        est.violates = *est.dimension > est.bound + noise;
      }
    }
    audit.estimates.push_back(std::move(est));
  }

  // The finest field carries the witness.
  const StratumField* finest = &fields.front();
  for (const auto& f : fields)
    if (f.grid().max_spacing() < finest->grid().max_spacing()) finest = &f;
  for (const auto& c : finest->cells()) {
    if (c.label < 2) continue;
    audit.closedness_witness =
        audit.closedness_witness ? std::min(*audit.closedness_witness, c.max_cross_norm) : c.max_cross_norm;
  }
  return audit;
}

}  // namespace semicoupling
