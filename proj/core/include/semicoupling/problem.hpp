#pragma once

#include "semicoupling/cost.hpp"
#include "semicoupling/measures.hpp"
#include "semicoupling/tolerances.hpp"

namespace semicoupling {

/// A semicoupling problem: abundant source, finite target, cost, tolerances.
class Problem {
 public:
  /// Throws AbundanceError unless the target mass is strictly below the
  /// source mass, ValidationError on dimension mismatch.
  Problem(SourceMeasure source, TargetMeasure target, CostPtr cost, Tolerances tolerances = {});

  const SourceMeasure& source() const noexcept { return source_; }
  const TargetMeasure& target() const noexcept { return target_; }
  const Grid& grid() const noexcept { return source_.grid(); }
  const CostModel& cost() const noexcept { return *cost_; }
  const CostPtr& cost_ptr() const noexcept { return cost_; }
  const Tolerances& tolerances() const noexcept { return tolerances_; }
  int dimension() const noexcept { return source_.grid().dimension(); }

  /// Same target, cost and tolerances with the source resampled on a grid
  /// with `per_axis` cells along every axis. Needs the source sampler.
  Problem refined(int per_axis) const;

 private:
  SourceMeasure source_;
  TargetMeasure target_;
  CostPtr cost_;
  Tolerances tolerances_;
};

}  // namespace semicoupling
