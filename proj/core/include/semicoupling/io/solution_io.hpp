#pragma once

#include <string>
#include <vector>

#include "semicoupling/audit.hpp"
#include "semicoupling/dual_solver.hpp"
#include "semicoupling/retraction.hpp"
#include "semicoupling/stratify.hpp"
#include "semicoupling/uhs.hpp"

namespace semicoupling::io {

inline constexpr const char* kSolutionSchema = "semicoupling/solution/1";
inline constexpr const char* kStrataSchema = "semicoupling/strata/1";
inline constexpr const char* kStrataReportSchema = "semicoupling/strata_report/1";
inline constexpr const char* kUHSReportSchema = "semicoupling/uhs_report/1";
inline constexpr const char* kUHSSamplesSchema = "semicoupling/uhs_samples/1";
inline constexpr const char* kTrajectorySchema = "semicoupling/trajectories/1";
inline constexpr const char* kOmegaSchema = "semicoupling/omega/1";
inline constexpr const char* kFlowReportSchema = "semicoupling/flow_report/1";

std::string tool_version();

struct SolutionRecord {
  DualSolution solution;
  std::vector<AssumptionCheck> audit;
  std::vector<std::string> warnings;
};

void write_solution(const std::string& path, const SolutionRecord& record);
SolutionRecord read_solution(const std::string& path);

/// Per-cell CSV: cell, x0.., active, cardinality, rank, label, max_cross_norm.
void write_strata_csv(const std::string& path, const StratumField& field);
/// Cells and their centers (one column per row of the file).
std::vector<StratumCell> read_strata_csv(const std::string& path, Matrix* centers = nullptr);

struct StrataReport {
  std::vector<int> resolution;
  double tie = 0.0;
  double tol_rank = 0.0;
  /// counts[j] = number of cells in Z_j at the run resolution.
  std::vector<std::size_t> counts;
  /// Clusters of Z_j for j >= 2, keyed by j.
  std::vector<std::pair<int, std::vector<Cluster>>> clusters;
  DimensionAudit audit;
  bool nested = true;
};

StrataReport make_strata_report(const StratumField& field, const DimensionAudit& audit);
void write_strata_report(const std::string& path, const StrataReport& report);
StrataReport read_strata_report(const std::string& path);

/// Summary YAML plus one CSV row per sample.
void write_uhs(const std::string& report_path, const std::string& samples_path, const UHSReport& report);
UHSReport read_uhs(const std::string& report_path, const std::string& samples_path);

/// trajectories.csv: seed_id, t, x0.., u_min, v0..; omega.csv: seed_id,
/// x0.. (seed), omega, termination, end_x0.., max_drift, accepted_steps,
/// rejected_steps; the YAML report holds the region summary. The u_min
/// column carries the flow's gap, which is u_min in off-domain mode and the
/// gap to the nearest non-tied target in cellular mode.
void write_flow(const std::string& trajectories_path, const std::string& omega_path,
                const std::string& report_path, const RegionFlow& flow, const FieldSpec& spec);
RegionFlow read_flow(const std::string& trajectories_path, const std::string& omega_path,
                     const std::string& report_path);

}  // namespace semicoupling::io
