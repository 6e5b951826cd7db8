#include "semicoupling/io/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "io/yaml_util.hpp"
#include "semicoupling/audit.hpp"
#include "semicoupling/dual_solver.hpp"
#include "semicoupling/io/csv.hpp"
#include "semicoupling/io/solution_io.hpp"
#include "semicoupling/retraction.hpp"
#include "semicoupling/singularity.hpp"
#include "semicoupling/stratify.hpp"
#include "semicoupling/uhs.hpp"

namespace semicoupling::io {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[digest[k] >> 4];
    out += hex[digest[k] & 15];
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

const StageRecord* RunManifest::stage(const std::string& name) const {
  for (const auto& s : stages)
    if (s.name == name) return &s;
  return nullptr;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  YAML::Emitter out;
  configure(out);
  out << YAML::BeginMap;
  out << YAML::Key << "schema" << YAML::Value << kManifestSchema;
  out << YAML::Key << "tool_version" << YAML::Value << m.tool_version;
  out << YAML::Key << "input_hash" << YAML::Value << m.input_hash;
  out << YAML::Key << "seed" << YAML::Value << m.seed;
  out << YAML::Key << "stages" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : m.stages) {
    out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << s.name << YAML::Key << "seconds" << YAML::Value
        << s.seconds << YAML::Key << "files" << YAML::Value << YAML::BeginSeq;
    for (const auto& f : s.files)
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << f.name << YAML::Key << "rows"
          << YAML::Value << f.rows << YAML::Key << "sha256" << YAML::Value << f.sha256 << YAML::EndMap;
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "failed_stage" << YAML::Value;
  if (m.failed_stage)
    out << *m.failed_stage;
  else
    out << YAML::Null;
  out << YAML::Key << "error" << YAML::Value << m.error;
  out << YAML::EndMap;
  write_text(path, out.c_str());
}

RunManifest read_manifest(const std::string& path) {
  const YAML::Node root = parse_file(path);
  if (optional_or<std::string>(root, "schema", "") != kManifestSchema)
    schema_fail(root, "schema", "'" + path + "' is not a manifest");
  RunManifest m;
  m.tool_version = required<std::string>(root, "tool_version", "manifest");
  m.input_hash = required<std::string>(root, "input_hash", "manifest");
  m.seed = required<std::uint64_t>(root, "seed", "manifest");
  for (const auto& s : root["stages"]) {
    StageRecord rec;
    rec.name = required<std::string>(s, "name", "stage");
    rec.seconds = required<double>(s, "seconds", "stage");
    for (const auto& f : s["files"])
      rec.files.push_back({required<std::string>(f, "name", "file"), required<std::size_t>(f, "rows", "file"),
                           required<std::string>(f, "sha256", "file")});
    m.stages.push_back(std::move(rec));
  }
  if (root["failed_stage"] && !root["failed_stage"].IsNull())
    m.failed_stage = read_as<std::string>(root["failed_stage"], "failed_stage");
  m.error = optional_or<std::string>(root, "error", "");
  return m;
}

namespace {

struct Context {
  const RunConfig& cfg;
  fs::path out;
  std::string file(const char* name) const { return (out / name).string(); }
};

FileRecord record(const Context& ctx, const char* name, std::size_t rows) {
  return {name, rows, sha256_file(ctx.file(name))};
}

Potential load_potential(const Context& ctx, const Problem& problem, const char* stage) {
  const std::string path = ctx.file("solution.yaml");
  if (!fs::exists(path)) throw ValidationError(std::string(stage) + ": missing " + path + " (run solve first)");
  Potential pot = read_solution(path).solution.potential;
  if (pot.size() != problem.target().size()) throw ValidationError(std::string(stage) + ": solution does not match the problem");
  return pot;
}

/// Deterministic subsample preserving order.
Matrix subsample(const Matrix& cols, std::size_t cap, std::uint64_t seed) {
  if (static_cast<std::size_t>(cols.cols()) <= cap) return cols;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(cols.cols()));
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<Eigen::Index>(k);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  Matrix out(cols.rows(), static_cast<Eigen::Index>(cap));
  for (std::size_t k = 0; k < cap; ++k) out.col(static_cast<Eigen::Index>(k)) = cols.col(idx[k]);
  return out;
}

Matrix read_seed_file(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read seed file '" + path + "'");
  std::vector<Vector> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (static_cast<int>(fields.size()) != d) throw ValidationError("seed file '" + path + "': expected " + std::to_string(d) + " columns");
    Vector x(d);
    try {
      for (int a = 0; a < d; ++a) x[a] = parse_double(fields[a]);
    } catch (const ValidationError&) {
      if (pts.empty()) continue;  // header row
      throw;
    }
    pts.push_back(std::move(x));
  }
  Matrix out(d, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = pts[k];
  return out;
}

/// Keeps seeds inside the field's region.
Matrix region_filter(const Matrix& seeds, const Problem& problem, const Potential& pot, const FieldSpec& spec) {
  const double tie = spec.mode == FlowMode::cellular ? problem.tolerances().tie_tolerance(problem, pot) : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < seeds.cols(); ++k) {
    const Vector x = seeds.col(k);
    const double u = u_min(problem, pot, x);
    if (spec.mode == FlowMode::off_domain) {
      if (u > 0.0) keep.push_back(k);
      continue;
    }
    if (!(u <= tie)) continue;
    const auto sub = subdifferential(problem, pot, x, tie);
    if (matrix_rank(cross_diff_gradients(problem.cost(), problem.target(), x, sub.indices),
                    problem.tolerances().tol_rank) == spec.stratum - 1)
      keep.push_back(k);
  }
  Matrix out(seeds.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = seeds.col(keep[k]);
  return out;
}

StageRecord run_solve(const Context& ctx) {
  const Problem problem = build_problem(ctx.cfg.problem);
  SolutionRecord rec;
  rec.audit = audit_assumptions(problem.cost(), problem.source(), problem.target(), problem.tolerances()).checks;
  SolverOptions opts;
  opts.max_iters = ctx.cfg.max_iters;
  opts.polish_iters = ctx.cfg.polish_iters;
  rec.solution = solve_dual(problem, opts);
  rec.warnings = tolerance_warnings(problem, rec.solution.potential, problem.tolerances());
  write_solution(ctx.file("solution.yaml"), rec);
  return {"solve", {record(ctx, "solution.yaml", 1)}, 0.0};
}

StageRecord run_strata(const Context& ctx) {
  const Problem problem = build_problem(ctx.cfg.problem);
  const Potential pot = load_potential(ctx, problem, "strata");
  const Tolerances& tol = problem.tolerances();
  const StratumField field = stratify(problem, pot, tol);
  if (!field.nested()) throw Error("strata: stratum labels are not nested");
  const auto fields = stratify_resolutions(problem, pot, tol, ctx.cfg.resolved_strata_resolutions());
  const DimensionAudit audit = dimension_audit(fields);
  write_strata_csv(ctx.file("strata.csv"), field);
  write_strata_report(ctx.file("strata_report.yaml"), make_strata_report(field, audit));
  return {"strata", {record(ctx, "strata.csv", field.grid().size()), record(ctx, "strata_report.yaml", 1)}, 0.0};
}

StageRecord run_uhs(const Context& ctx) {
  const Problem problem = build_problem(ctx.cfg.problem);
  const Potential pot = load_potential(ctx, problem, "uhs");
  const Matrix samples =
      subsample(region_samples(problem, pot, ctx.cfg.field, problem.tolerances(), ctx.cfg.uhs_samples_per_axis),
                ctx.cfg.uhs_max_samples, ctx.cfg.seed);
  if (samples.cols() == 0) throw ValidationError("uhs: no lattice samples fall in region " + region_name(ctx.cfg.field));
  const UHSReport rep = uhs_check(samples, problem, pot, ctx.cfg.field, problem.tolerances());
  write_uhs(ctx.file("uhs_report.yaml"), ctx.file("uhs_samples.csv"), rep);
  return {"uhs", {record(ctx, "uhs_report.yaml", 1), record(ctx, "uhs_samples.csv", rep.samples.size())}, 0.0};
}

StageRecord run_flow(const Context& ctx) {
  const Problem problem = build_problem(ctx.cfg.problem);
  const Potential pot = load_potential(ctx, problem, "flow");
  const int d = problem.dimension();
  if (fs::exists(ctx.file("uhs_report.yaml")) && !ctx.cfg.force) {
    const UHSReport rep = read_uhs(ctx.file("uhs_report.yaml"), ctx.file("uhs_samples.csv"));
    if (!rep.passed())
      throw Error("flow: UHS check failed on " + rep.region + " (" + std::to_string(rep.failures) +
                  " failing samples); set flow.force to run anyway");
  }
  Matrix seeds;
  if (ctx.cfg.seeds.kind == "file") {
    seeds = read_seed_file(ctx.cfg.resolve(ctx.cfg.seeds.file), d);
  } else {
    seeds = region_filter(lattice(problem.grid().box(), ctx.cfg.seeds.counts), problem, pot, ctx.cfg.field);
  }
  seeds = subsample(seeds, ctx.cfg.max_seeds, ctx.cfg.seed);
  if (seeds.cols() == 0) throw ValidationError("flow: no seeds in region " + region_name(ctx.cfg.field));
  const RegionFlow flow = retract_region(seeds, ctx.cfg.field, problem, pot, problem.tolerances());
  write_flow(ctx.file("trajectories.csv"), ctx.file("omega.csv"), ctx.file("flow_report.yaml"), flow, ctx.cfg.field);
  std::size_t rows = 0;
  for (const auto& t : flow.trajectories) rows += t.samples.size();
  return {"flow",
          {record(ctx, "trajectories.csv", rows), record(ctx, "omega.csv", flow.trajectories.size()),
           record(ctx, "flow_report.yaml", 1)},
          0.0};
}

}  // namespace

RunManifest run_stages(const RunConfig& cfg, const std::vector<Stage>& stages) {
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  const Context ctx{cfg, out};

  RunManifest m;
  m.tool_version = tool_version();
  m.seed = cfg.seed;
  RunConfig hashed = cfg;
  hashed.out_dir = "";
  m.input_hash = sha256_hex(emit_config(hashed));

  const std::string manifest_path = (out / "manifest.yaml").string();
  if (fs::exists(manifest_path)) {
    try {
      RunManifest old = read_manifest(manifest_path);
      if (old.input_hash == m.input_hash) m.stages = std::move(old.stages);
    } catch (const Error&) {
      // An unreadable manifest is replaced.
    }
  }

  for (Stage stage : stages) {
    const std::string name = to_string(stage);
    std::erase_if(m.stages, [&](const StageRecord& s) { return s.name == name; });
    const auto t0 = std::chrono::steady_clock::now();
    try {
      StageRecord rec;
      switch (stage) {
        case Stage::solve: rec = run_solve(ctx); break;
        case Stage::strata: rec = run_strata(ctx); break;
        case Stage::uhs: rec = run_uhs(ctx); break;
        case Stage::flow: rec = run_flow(ctx); break;
      }
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      m.stages.push_back(std::move(rec));
    } catch (const std::exception& e) {
      m.failed_stage = name;
      m.error = e.what();
      break;
    }
  }
  // Keep records in pipeline order.
  std::stable_sort(m.stages.begin(), m.stages.end(), [](const StageRecord& a, const StageRecord& b) {
    return stage_from_string(a.name) < stage_from_string(b.name);
  });
  write_manifest(manifest_path, m);
  return m;
}

RunManifest run_pipeline(const RunConfig& cfg) { return run_stages(cfg, cfg.stages); }

}  // namespace semicoupling::io
