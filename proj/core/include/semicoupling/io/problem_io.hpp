#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semicoupling/cost.hpp"
#include "semicoupling/grid.hpp"
#include "semicoupling/measures.hpp"
#include "semicoupling/problem.hpp"
#include "semicoupling/tolerances.hpp"

namespace semicoupling::io {

/// Source density description. `constant` uses value; `gaussian` is
/// scale * exp(-|x - mean|^2 / (2 sigma^2)); `table` lists one sample per
/// cell, axis 0 fastest, and fixes the resolution.
struct DensitySpec {
  std::string kind = "constant";
  double value = 1.0;
  std::vector<double> mean;
  double sigma = 1.0;
  double scale = 1.0;
  std::vector<double> values;
};

struct CostSpec {
  CostKind kind = CostKind::quadratic;
  /// log_repulsive only; defaults to log of the box diameter, which keeps
  /// the cost nonnegative on the box.
  std::optional<double> offset;
};

/// Serializable description of a problem.
struct ProblemSpec {
  std::string name;
  Box box;
  std::vector<int> resolution;
  DensitySpec density;
  Matrix points;
  std::vector<double> masses;
  std::optional<std::vector<double>> quad_weights;
  /// ord(y) per target; empty means 1 everywhere.
  std::vector<double> order;
  CostSpec cost;
  Tolerances tolerances;
};

ProblemSpec parse_problem_spec(const std::string& text, const std::string& source_name = "<string>");
ProblemSpec load_problem_spec(const std::string& path);
std::string emit_problem_spec(const ProblemSpec& spec);

/// Density function of the description; empty for tables.
DensityFunction make_density(const ProblemSpec& spec);
CostPtr make_cost(const ProblemSpec& spec);
/// Throws AbundanceError, DensitySampleError or ValidationError.
Problem build_problem(const ProblemSpec& spec);

}  // namespace semicoupling::io
