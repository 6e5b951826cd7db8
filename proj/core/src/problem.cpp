#include "semicoupling/problem.hpp"

#include "semicoupling/error.hpp"

namespace semicoupling {

Problem::Problem(SourceMeasure source, TargetMeasure target, CostPtr cost, Tolerances tolerances)
    : source_(std::move(source)),
      target_(std::move(target)),
      cost_(std::move(cost)),
      tolerances_(std::move(tolerances)) {
  if (!cost_) throw ValidationError("problem: no cost model");
  if (target_.dimension() != source_.grid().dimension())
    throw ValidationError("problem: target dimension " + std::to_string(target_.dimension()) +
                          " differs from source dimension " +
                          std::to_string(source_.grid().dimension()));
  tolerances_.validate();
  if (!(target_.total_mass() < source_.total_mass()))
    throw AbundanceError(source_.total_mass(), target_.total_mass());
}

Problem Problem::refined(int per_axis) const {
  if (!source_.sampler()) throw ValidationError("problem: source has no sampler to refine");
  const Grid& g = source_.grid();
  return Problem(make_source(g.box(), std::vector<int>(g.resolution().size(), per_axis), source_.sampler()),
                 target_, cost_, tolerances_);
}

}  // namespace semicoupling
