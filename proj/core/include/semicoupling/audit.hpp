#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semicoupling/cost.hpp"
#include "semicoupling/measures.hpp"
#include "semicoupling/tolerances.hpp"

namespace semicoupling {

struct AssumptionCheck {
  std::string id;  // "A0" ... "A5"
  std::string description;
  bool passed = true;
  std::optional<Vector> witness_point;
  std::optional<std::pair<int, int>> witness_targets;
  std::string detail;
};

struct AuditReport {
  std::vector<AssumptionCheck> checks;
  std::size_t samples = 0;

  bool all_passed() const;
  const AssumptionCheck& check(const std::string& id) const;
};

/// Numerical audit of the cost assumptions on a sample lattice of the
/// source box (at most `samples_per_axis` points per axis) plus its
/// corners. Never throws on a failed assumption; failures carry witnesses.
AuditReport audit_assumptions(const CostModel& cost, const SourceMeasure& source,
                              const TargetMeasure& target, const Tolerances& tolerances,
                              int samples_per_axis = 9);

}  // namespace semicoupling
