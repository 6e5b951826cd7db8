#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "instances.hpp"
#include "semicoupling/dual_solver.hpp"
#include "semicoupling/error.hpp"
#include "semicoupling/io/config.hpp"
#include "semicoupling/io/csv.hpp"
#include "semicoupling/io/pipeline.hpp"
#include "semicoupling/io/problem_io.hpp"
#include "semicoupling/io/solution_io.hpp"
#include "semicoupling/retraction.hpp"
#include "semicoupling/stratify.hpp"
#include "semicoupling/uhs.hpp"

namespace fs = std::filesystem;
namespace sc = semicoupling;
namespace io = semicoupling::io;
using sc::Matrix;
using sc::Vector;

namespace {

const char* kSmallProblem = R"(problem:
  name: small_pair
  dimension: 2
  box: {lo: [-1, -1], hi: [1, 1]}
  resolution: 32
  density: {kind: constant, value: 1}
  target:
    points: [[-0.3, 0], [0.3, 0]]
    masses: [0.4, 0.4]
  cost: {kind: quadratic}
)";

std::string small_config(const std::string& extra) {
  return std::string(kSmallProblem) + "seed: 3\nstrata:\n  resolutions: [16, 32]\nuhs:\n  samples_per_axis: 9\n"
         "flow:\n  seeds: grid:4x4\n" + extra;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("semico_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

TEST(ProblemIO, EmitThenParseIsIdentity) {
  auto spec = io::parse_problem_spec(std::string(kSmallProblem).substr(std::string("problem:\n").size()), "inline");
  spec.quad_weights = std::vector<double>{0.25, 0.75};
  spec.order = {1.0, 2.0};
  spec.tolerances.tol_tie = 1e-3;
  spec.points(0, 1) = 0.1 + 1e-16;
  const auto again = io::parse_problem_spec(io::emit_problem_spec(spec));
  EXPECT_EQ(again.name, "small_pair");
  EXPECT_EQ(again.resolution, std::vector<int>({32}));
  EXPECT_TRUE((again.points - spec.points).isZero(0.0));
  EXPECT_EQ(again.masses, spec.masses);
  EXPECT_EQ(again.quad_weights, spec.quad_weights);
  EXPECT_EQ(again.order, spec.order);
  EXPECT_EQ(again.tolerances.tol_tie, 1e-3);
  EXPECT_EQ(io::emit_problem_spec(again), io::emit_problem_spec(spec));
  const auto p = io::build_problem(again);
  EXPECT_EQ(p.grid().size(), 1024u);
  EXPECT_EQ(p.target().averaging_weights(), std::vector<double>({0.25, 0.75}));
}

TEST(ProblemIO, SchemaErrorsNameKeyAndLine) {
  const std::string bad = R"(name: x
dimension: 2
box: {lo: [-1, -1], hi: [1, 1]}
resolution: 16
target:
  points: [[0, 0]]
  masses: [0.1]
  colour: red
)";
  try {
    io::parse_problem_spec(bad);
    FAIL() << "unknown key accepted";
  } catch (const sc::SchemaError& e) {
    EXPECT_EQ(e.key(), "colour");
    EXPECT_EQ(e.line(), 8);
  }
  try {
    io::parse_problem_spec("name: x\ndimension: 2\nbox: {lo: [-1, -1], hi: [1, 1]}\nresolution: 16\n"
                           "target:\n  points: [[0, 0], [1, 1]]\n  masses: [0.1]\n");
    FAIL() << "mass count mismatch accepted";
  } catch (const sc::SchemaError& e) {
    EXPECT_EQ(e.key(), "masses");
    EXPECT_EQ(e.line(), 7);
  }
  EXPECT_THROW(io::parse_problem_spec("name: [unclosed\n"), sc::SchemaError);
}

TEST(Config, StagesMustBeAPrefix) {
  const auto cfg = io::parse_config(small_config("stages: [solve, strata]\n"));
  EXPECT_EQ(cfg.stages, std::vector<io::Stage>({io::Stage::solve, io::Stage::strata}));
  EXPECT_EQ(cfg.seed, 3u);
  EXPECT_EQ(cfg.resolved_strata_resolutions(), std::vector<int>({16, 32}));
  try {
    io::parse_config(small_config("stages: [solve, uhs]\n"));
    FAIL() << "non-prefix stage list accepted";
  } catch (const sc::SchemaError& e) {
    EXPECT_EQ(e.key(), "stages");
  }
  EXPECT_THROW(io::parse_config(small_config("problem_file: nowhere.yaml\n")), sc::SchemaError);
  const auto again = io::parse_config(io::emit_config(cfg));
  EXPECT_EQ(io::emit_config(again), io::emit_config(cfg));
}

TEST(Config, DefaultStrataResolutionsAreQuarterHalfFull) {
  const auto cfg = io::parse_config(std::string(kSmallProblem));
  EXPECT_EQ(cfg.resolved_strata_resolutions(), std::vector<int>({8, 16, 32}));
  EXPECT_EQ(cfg.stages, io::all_stages());
}

TEST(Config, SeedStrings) {
  const auto g = io::parse_seed_spec("grid:7x5");
  EXPECT_EQ(g.kind, "grid");
  EXPECT_EQ(g.counts, std::vector<int>({7, 5}));
  EXPECT_EQ(io::to_string(g), "grid:7x5");
  const auto f = io::parse_seed_spec("file:seeds.csv");
  EXPECT_EQ(f.kind, "file");
  EXPECT_EQ(f.file, "seeds.csv");
  EXPECT_THROW(io::parse_seed_spec("grid:0x3"), sc::ValidationError);
  EXPECT_THROW(io::parse_seed_spec("random:5"), sc::ValidationError);
}

TEST(Csv, DoublesRoundTripExactly) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::nextafter(1.0, 2.0)})
    EXPECT_EQ(io::parse_double(io::format_double(v)), v);
  EXPECT_TRUE(std::isinf(io::parse_double(io::format_double(std::numeric_limits<double>::infinity()))));
  EXPECT_THROW(io::parse_double("1.0abc"), sc::ValidationError);

  TempDir dir;
  io::CsvTable t;
  t.schema = "semicoupling/test/1";
  t.version = io::tool_version();
  t.header = {"a", "b"};
  t.rows = {{"1", io::format_double(0.1)}, {"2", io::format_double(-3.25)}};
  io::write_csv(dir.file("t.csv"), t);
  const auto back = io::read_csv(dir.file("t.csv"));
  EXPECT_EQ(back.schema, t.schema);
  EXPECT_EQ(back.version, t.version);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.column("b"), 1u);
  EXPECT_THROW(back.column("c"), sc::ValidationError);
}

TEST(SolutionIO, SolutionRoundTrip) {
  TempDir dir;
  const auto p = sc::testing::two_ball(32);
  io::SolutionRecord rec;
  rec.solution = sc::solve_dual(p);
  rec.warnings = {"a warning"};
  io::write_solution(dir.file("solution.yaml"), rec);
  const auto back = io::read_solution(dir.file("solution.yaml"));
  EXPECT_TRUE((back.solution.potential.psi() - rec.solution.potential.psi()).isZero(0.0));
  EXPECT_EQ(back.solution.dual_value, rec.solution.dual_value);
  EXPECT_EQ(back.solution.primal_value, rec.solution.primal_value);
  EXPECT_EQ(back.solution.residual, rec.solution.residual);
  EXPECT_EQ(back.solution.iterations, rec.solution.iterations);
  EXPECT_EQ(back.solution.log.size(), rec.solution.log.size());
  EXPECT_EQ(back.warnings, rec.warnings);
}

TEST(SolutionIO, StrataAndUHSRoundTrip) {
  TempDir dir;
  const auto p = sc::testing::triangle(32);
  const auto pot = sc::solve_dual(p).potential;
  const auto field = sc::stratify(p, pot, p.tolerances());
  io::write_strata_csv(dir.file("strata.csv"), field);
  Matrix centers;
  const auto cells = io::read_strata_csv(dir.file("strata.csv"), &centers);
  ASSERT_EQ(cells.size(), field.grid().size());
  ASSERT_EQ(centers.cols(), static_cast<Eigen::Index>(cells.size()));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    EXPECT_EQ(cells[c].label, field.cell(c).label);
    EXPECT_EQ(cells[c].max_cross_norm, field.cell(c).max_cross_norm);
    EXPECT_TRUE((centers.col(c) - field.grid().center(c)).isZero(0.0));
  }

  const auto fields = sc::stratify_resolutions(p, pot, p.tolerances(), {16, 32});
  const auto report = io::make_strata_report(field, sc::dimension_audit(fields));
  io::write_strata_report(dir.file("strata_report.yaml"), report);
  const auto rb = io::read_strata_report(dir.file("strata_report.yaml"));
  EXPECT_EQ(rb.counts, report.counts);
  EXPECT_EQ(rb.tie, report.tie);
  EXPECT_EQ(rb.nested, report.nested);
  EXPECT_EQ(rb.clusters.size(), report.clusters.size());

  const sc::FieldSpec spec;
  const auto uhs = sc::uhs_check(sc::region_samples(p, pot, spec, p.tolerances(), 9), p, pot, spec, p.tolerances());
  io::write_uhs(dir.file("uhs_report.yaml"), dir.file("uhs_samples.csv"), uhs);
  const auto ub = io::read_uhs(dir.file("uhs_report.yaml"), dir.file("uhs_samples.csv"));
  EXPECT_EQ(ub.region, uhs.region);
  EXPECT_EQ(ub.failures, uhs.failures);
  EXPECT_EQ(ub.min_hull_distance, uhs.min_hull_distance);
  ASSERT_EQ(ub.samples.size(), uhs.samples.size());
  for (std::size_t k = 0; k < ub.samples.size(); ++k) {
    EXPECT_EQ(ub.samples[k].field_norm, uhs.samples[k].field_norm);
    EXPECT_EQ(ub.samples[k].passed, uhs.samples[k].passed);
  }
}

TEST(SolutionIO, FlowRoundTrip) {
  TempDir dir;
  const auto p = sc::testing::single_dirac(32);
  const auto pot = sc::solve_dual(p).potential;
  Matrix seeds(2, 3);
  seeds << 0.8, -0.7, 0.1, 0.2, 0.5, -0.9;
  const sc::FieldSpec spec;
  const auto flow = sc::retract_region(seeds, spec, p, pot, p.tolerances());
  io::write_flow(dir.file("trajectories.csv"), dir.file("omega.csv"), dir.file("flow_report.yaml"), flow, spec);
  const auto back = io::read_flow(dir.file("trajectories.csv"), dir.file("omega.csv"), dir.file("flow_report.yaml"));
  ASSERT_EQ(back.trajectories.size(), 3u);
  EXPECT_EQ(back.pole_reached, flow.pole_reached);
  EXPECT_EQ(back.max_neighbor_ratio, flow.max_neighbor_ratio);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& a = flow.trajectories[k];
    const auto& b = back.trajectories[k];
    EXPECT_EQ(b.omega, a.omega);
    EXPECT_EQ(b.terminated_by, a.terminated_by);
    EXPECT_TRUE((b.seed - a.seed).isZero(0.0));
    EXPECT_TRUE((b.endpoint - a.endpoint).isZero(0.0));
    ASSERT_EQ(b.samples.size(), a.samples.size());
    EXPECT_EQ(b.samples.back().gap, a.samples.back().gap);
    EXPECT_TRUE((b.samples.back().velocity - a.samples.back().velocity).isZero(0.0));
  }
}

TEST(Manifest, Sha256KnownAnswer) {
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Pipeline, StagesRunInOrderAndManifestsMerge) {
  TempDir dir;
  auto cfg = io::parse_config(small_config("stages: [solve, strata, uhs, flow]\n"));
  cfg.out_dir = dir.path().string();
  const auto first = io::run_stages(cfg, {io::Stage::solve, io::Stage::strata, io::Stage::uhs});
  ASSERT_TRUE(first.ok()) << first.error;
  EXPECT_EQ(first.stages.size(), 3u);
  for (const char* f : {"solution.yaml", "strata.csv", "strata_report.yaml", "uhs_report.yaml", "uhs_samples.csv"})
    EXPECT_TRUE(fs::exists(dir.file(f))) << f;

  const auto second = io::run_stages(cfg, {io::Stage::flow});
  ASSERT_TRUE(second.ok()) << second.error;
  ASSERT_EQ(second.stages.size(), 4u);
  EXPECT_EQ(second.stages.back().name, "flow");
  const auto* strata = second.stage("strata");
  ASSERT_NE(strata, nullptr);
  EXPECT_EQ(strata->files.front().sha256, io::sha256_file(dir.file("strata.csv")));
  EXPECT_EQ(strata->files.front().rows, 1024u);

  const auto disk = io::read_manifest(dir.file("manifest.yaml"));
  EXPECT_EQ(disk.input_hash, second.input_hash);
  EXPECT_EQ(disk.stages.size(), 4u);
  EXPECT_TRUE(disk.ok());
}

TEST(Pipeline, MissingPredecessorFailsTheStage) {
  TempDir dir;
  auto cfg = io::parse_config(small_config(""));
  cfg.out_dir = dir.path().string();
  const auto m = io::run_stages(cfg, {io::Stage::uhs});
  EXPECT_FALSE(m.ok());
  EXPECT_EQ(m.failed_stage.value_or(""), "uhs");
  EXPECT_FALSE(m.error.empty());
  const auto disk = io::read_manifest(dir.file("manifest.yaml"));
  EXPECT_EQ(disk.failed_stage.value_or(""), "uhs");
}
