// semico: command line front end for the semicoupling pipeline.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "semicoupling/error.hpp"
#include "semicoupling/io/config.hpp"
#include "semicoupling/io/pipeline.hpp"
#include "semicoupling/io/solution_io.hpp"

namespace sio = semicoupling::io;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  // solve
  std::optional<double> tol_mass;
  std::optional<int> max_iters;
  std::optional<int> resolution;
  // strata
  std::vector<int> resolutions;
  std::optional<double> tie_scale;
  // field
  std::optional<std::string> mode;
  std::optional<int> stratum;
  std::optional<double> beta;
  // uhs
  std::optional<int> samples;
  std::optional<std::size_t> max_samples;
  // flow
  std::optional<std::string> seeds;
  std::optional<double> eps_stop;
  std::optional<std::size_t> max_seeds;
  bool force = false;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config, "Run configuration (YAML)")->required()->check(CLI::ExistingFile);
  app->add_option("-o,--out", o.out, "Output directory (overrides out_dir)");
  app->add_option("--seed", o.seed, "Seed for sampled audits");
}

void add_field(CLI::App* app, Overrides& o) {
  app->add_option("--mode", o.mode, "Field mode")->check(CLI::IsMember({"offdomain", "cellular"}));
  app->add_option("--stratum", o.stratum, "Cellular mode: run on Z_j - Z_{j+1}")->check(CLI::PositiveNumber);
  app->add_option("--beta", o.beta, "Blow-up exponent (>= 2)");
}

sio::RunConfig apply(const Overrides& o) {
  sio::RunConfig cfg = sio::load_config(o.config);
  if (o.out) cfg.out_dir = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.tol_mass) cfg.problem.tolerances.tol_mass = *o.tol_mass;
  if (o.max_iters) cfg.max_iters = *o.max_iters;
  if (o.resolution) cfg.problem.resolution = {*o.resolution};
  if (!o.resolutions.empty()) cfg.strata_resolutions = o.resolutions;
  if (o.tie_scale) cfg.problem.tolerances.tie_scale = *o.tie_scale;
  if (o.mode) cfg.field.mode = semicoupling::flow_mode_from_string(*o.mode);
  if (o.stratum) cfg.field.stratum = *o.stratum;
  if (o.beta) cfg.field.beta = *o.beta;
  if (o.samples) cfg.uhs_samples_per_axis = *o.samples;
  if (o.max_samples) cfg.uhs_max_samples = *o.max_samples;
  if (o.seeds) cfg.seeds = sio::parse_seed_spec(*o.seeds);
  if (o.eps_stop) cfg.problem.tolerances.eps_stop = *o.eps_stop;
  if (o.max_seeds) cfg.max_seeds = *o.max_seeds;
  if (o.force) cfg.force = true;
  cfg.problem.tolerances.validate();
  sio::validate_config(cfg);
  return cfg;
}

void summarize(const sio::RunManifest& m, const std::string& out_dir) {
  for (const auto& s : m.stages) {
    std::printf("%-7s %8.3fs", s.name.c_str(), s.seconds);
    for (const auto& f : s.files) std::printf("  %s (%zu rows)", f.name.c_str(), f.rows);
    std::printf("\n");
  }
  std::printf("manifest: %s/manifest.yaml\n", out_dir.c_str());
}

int run(const Overrides& o, const std::optional<sio::Stage>& only) {
  sio::RunConfig cfg;
  try {
    cfg = apply(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "semico: config: %s\n", e.what());
    return 2;
  }
  const sio::RunManifest m = only ? sio::run_stages(cfg, {*only}) : sio::run_pipeline(cfg);
  summarize(m, cfg.out_dir);
  if (!m.ok()) {
    std::fprintf(stderr, "semico: stage '%s' failed: %s\n", m.failed_stage->c_str(), m.error.c_str());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-discrete c-optimal semicouplings: dual solve, singular strata, UHS checks, blow-up flows"};
  app.set_version_flag("--version", sio::tool_version());
  app.require_subcommand(1);

  Overrides o;
  std::optional<sio::Stage> stage;

  auto* solve = app.add_subcommand("solve", "Solve the dual problem; writes solution.yaml");
  add_common(solve, o);
  solve->add_option("--tol-mass", o.tol_mass, "Mass residual tolerance");
  solve->add_option("--max-iters", o.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  solve->add_option("--resolution", o.resolution, "Cells per axis")->check(CLI::Range(2, 1 << 15));

  auto* strata = app.add_subcommand("strata", "Stratify the solved potential; writes strata.csv and strata_report.yaml");
  add_common(strata, o);
  strata->add_option("--resolutions", o.resolutions, "Resolutions for the dimension audit");
  strata->add_option("--tie-scale", o.tie_scale, "Tie tolerance in units of h * L");

  auto* uhs = app.add_subcommand("uhs", "Check the UHS conditions on a region; writes uhs_report.yaml");
  add_common(uhs, o);
  add_field(uhs, o);
  uhs->add_option("--region", o.mode, "Region: offdomain (X - A) or cellular (Z_j - Z_{j+1}, with --stratum)")
      ->check(CLI::IsMember({"offdomain", "cellular"}));
  uhs->add_option("--samples", o.samples, "Lattice nodes per axis")->check(CLI::Range(2, 4096));
  uhs->add_option("--max-samples", o.max_samples, "Cap on samples, subsampled with --seed");

  auto* flow = app.add_subcommand("flow", "Integrate blow-up flows; writes trajectories.csv and omega.csv");
  add_common(flow, o);
  add_field(flow, o);
  flow->add_option("--seeds", o.seeds, "grid:NxM or file:path");
  flow->add_option("--eps-stop", o.eps_stop, "Stop threshold on the gap");
  flow->add_option("--max-seeds", o.max_seeds, "Cap on seeds, subsampled with --seed");
  flow->add_flag("--force", o.force, "Run even if the UHS check failed");

  auto* pipeline = app.add_subcommand("pipeline", "Run the configured stage list");
  add_common(pipeline, o);
  pipeline->add_flag("--force", o.force, "Run the flow even if the UHS check failed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; every usage error is a configuration error.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) stage = sio::Stage::solve;
    if (strata->parsed()) stage = sio::Stage::strata;
    if (uhs->parsed()) stage = sio::Stage::uhs;
    if (flow->parsed()) stage = sio::Stage::flow;
    return run(o, stage);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "semico: %s\n", e.what());
    return 1;
  }
}
