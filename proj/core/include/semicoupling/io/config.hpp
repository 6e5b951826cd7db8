#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semicoupling/fields.hpp"
#include "semicoupling/io/problem_io.hpp"

namespace semicoupling::io {

enum class Stage { solve, strata, uhs, flow };
std::string to_string(Stage stage);
Stage stage_from_string(const std::string& name);
const std::vector<Stage>& all_stages();

/// Flow seeds: `grid:NxM` is a node lattice over the box restricted to the
/// field's region; `file:path` reads a CSV of coordinates.
struct SeedSpec {
  std::string kind = "grid";
  std::vector<int> counts{10, 10};
  std::string file;
};
SeedSpec parse_seed_spec(const std::string& text);
std::string to_string(const SeedSpec& seeds);

struct RunConfig {
  /// Directory relative paths are resolved against.
  std::string base_dir = ".";
  ProblemSpec problem;
  std::optional<std::string> problem_file;
  std::vector<Stage> stages = all_stages();
  std::string out_dir = "out";
  std::uint64_t seed = 0;

  int max_iters = 200;
  int polish_iters = 6;

  /// Empty means R/4, R/2, R for problem resolution R.
  std::vector<int> strata_resolutions;

  FieldSpec field;

  int uhs_samples_per_axis = 33;
  std::size_t uhs_max_samples = 4000;

  SeedSpec seeds;
  std::size_t max_seeds = 400;
  /// Run the flow even when the UHS check failed.
  bool force = false;

  /// The resolved strata resolutions.
  std::vector<int> resolved_strata_resolutions() const;
  /// Path resolved against base_dir.
  std::string resolve(const std::string& path) const;
};

/// Parses a run configuration, fills defaults and validates it: the stage
/// list must be a prefix of solve, strata, uhs, flow; referenced files must
/// exist; the problem must be abundant. Throws SchemaError naming the key
/// and line for schema violations.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".",
                       const std::string& source_name = "<string>");
RunConfig load_config(const std::string& path);
void validate_config(const RunConfig& config);
std::string emit_config(const RunConfig& config);

}  // namespace semicoupling::io
