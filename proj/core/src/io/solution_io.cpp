#include "semicoupling/io/solution_io.hpp"

#include <algorithm>

#include "io/yaml_util.hpp"
#include "semicoupling/io/csv.hpp"

namespace semicoupling::io {

namespace {

std::vector<double> as_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }
Vector as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_schema(const YAML::Node& root, const char* schema, const std::string& path) {
  const auto found = optional_or<std::string>(root, "schema", "");
  if (found != schema) schema_fail(root, "schema", "'" + path + "' is not a " + std::string(schema) + " file");
}

void check_schema(const CsvTable& table, const char* schema, const std::string& path) {
  if (table.schema != schema) throw ValidationError("'" + path + "' is not a " + std::string(schema) + " file");
}

void begin(YAML::Emitter& out, const char* schema) {
  configure(out);
  out << YAML::BeginMap;
  out << YAML::Key << "schema" << YAML::Value << schema;
  out << YAML::Key << "version" << YAML::Value << tool_version();
}

std::string coord_name(const char* prefix, int a) { return prefix + std::to_string(a); }

}  // namespace

std::string tool_version() { return SEMICOUPLING_VERSION; }

// ---- solution ----

void write_solution(const std::string& path, const SolutionRecord& rec) {
  const DualSolution& sol = rec.solution;
  YAML::Emitter out;
  begin(out, kSolutionSchema);
  out << YAML::Key << "psi" << YAML::Value << YAML::Flow << as_std(sol.potential.psi());
  out << YAML::Key << "cell_masses" << YAML::Value << YAML::Flow << sol.cell_masses;
  out << YAML::Key << "dual_value" << YAML::Value << sol.dual_value;
  out << YAML::Key << "primal_value" << YAML::Value << sol.primal_value;
  out << YAML::Key << "relative_gap" << YAML::Value << sol.relative_gap();
  out << YAML::Key << "residual" << YAML::Value << sol.residual;
  out << YAML::Key << "active_mass" << YAML::Value << sol.active_mass;
  out << YAML::Key << "iterations" << YAML::Value << sol.iterations;
  out << YAML::Key << "log" << YAML::Value << YAML::BeginSeq;
  for (const auto& it : sol.log) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "iteration" << YAML::Value << it.iteration << YAML::Key
        << "dual_value" << YAML::Value << it.dual_value << YAML::Key << "residual" << YAML::Value << it.residual
        << YAML::Key << "step" << YAML::Value << it.step << YAML::Key << "method" << YAML::Value << it.method
        << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "audit" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : rec.audit) {
    out << YAML::BeginMap << YAML::Key << "id" << YAML::Value << c.id << YAML::Key << "description" << YAML::Value
        << c.description << YAML::Key << "passed" << YAML::Value << c.passed << YAML::Key << "detail" << YAML::Value
        << c.detail;
    if (c.witness_point) out << YAML::Key << "witness_point" << YAML::Value << YAML::Flow << as_std(*c.witness_point);
    if (c.witness_targets)
      out << YAML::Key << "witness_targets" << YAML::Value << YAML::Flow << YAML::BeginSeq << c.witness_targets->first
          << c.witness_targets->second << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "warnings" << YAML::Value << YAML::BeginSeq;
  for (const auto& w : rec.warnings) out << w;
  out << YAML::EndSeq;
  out << YAML::EndMap;
  write_text(path, out.c_str());
}

SolutionRecord read_solution(const std::string& path) {
  const YAML::Node root = parse_file(path);
  check_schema(root, kSolutionSchema, path);
  SolutionRecord rec;
  DualSolution& sol = rec.solution;
  sol.potential = Potential(as_vector(required<std::vector<double>>(root, "psi", "solution")));
  sol.cell_masses = required<std::vector<double>>(root, "cell_masses", "solution");
  sol.dual_value = required<double>(root, "dual_value", "solution");
  sol.primal_value = required<double>(root, "primal_value", "solution");
  sol.residual = required<double>(root, "residual", "solution");
  sol.active_mass = required<double>(root, "active_mass", "solution");
  sol.iterations = required<int>(root, "iterations", "solution");
  for (const auto& it : root["log"]) {
    sol.log.push_back({required<int>(it, "iteration", "log"), required<double>(it, "dual_value", "log"),
                       required<double>(it, "residual", "log"), required<double>(it, "step", "log"),
                       required<std::string>(it, "method", "log")});
  }
  for (const auto& c : root["audit"]) {
    AssumptionCheck check;
    check.id = required<std::string>(c, "id", "audit");
    check.description = optional_or<std::string>(c, "description", "");
    check.passed = required<bool>(c, "passed", "audit");
    check.detail = optional_or<std::string>(c, "detail", "");
    if (c["witness_point"]) check.witness_point = as_vector(read_as<std::vector<double>>(c["witness_point"], "witness_point"));
    if (c["witness_targets"]) {
      const auto t = read_as<std::vector<int>>(c["witness_targets"], "witness_targets");
      if (t.size() == 2) check.witness_targets = std::make_pair(t[0], t[1]);
    }
    rec.audit.push_back(std::move(check));
  }
  for (const auto& w : root["warnings"]) rec.warnings.push_back(w.as<std::string>());
  return rec;
}

// ---- strata ----

void write_strata_csv(const std::string& path, const StratumField& field) {
  const Grid& grid = field.grid();
  const int d = grid.dimension();
  CsvTable table;
  table.schema = kStrataSchema;
  table.version = tool_version();
  table.header.push_back("cell");
  for (int a = 0; a < d; ++a) table.header.push_back(coord_name("x", a));
  for (const char* c : {"active", "cardinality", "rank", "label", "max_cross_norm"}) table.header.push_back(c);
  table.rows.reserve(grid.size());
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    const auto& c = field.cell(flat);
    std::vector<std::string> row{std::to_string(flat)};
    for (int a = 0; a < d; ++a) row.push_back(format_double(grid.center(flat)[a]));
    row.push_back(c.active ? "1" : "0");
    row.push_back(std::to_string(c.cardinality));
    row.push_back(std::to_string(c.rank));
    row.push_back(std::to_string(c.label));
    row.push_back(format_double(c.max_cross_norm));
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

std::vector<StratumCell> read_strata_csv(const std::string& path, Matrix* centers) {
  const CsvTable table = read_csv(path);
  check_schema(table, kStrataSchema, path);
  int d = 0;
  while (std::find(table.header.begin(), table.header.end(), coord_name("x", d)) != table.header.end()) ++d;
  const std::size_t active = table.column("active"), card = table.column("cardinality"), rank = table.column("rank"),
                    label = table.column("label"), cross = table.column("max_cross_norm");
  std::vector<StratumCell> cells;
  cells.reserve(table.rows.size());
  if (centers) centers->resize(d, static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    StratumCell c;
    c.active = row[active] == "1";
    c.cardinality = std::stoi(row[card]);
    c.rank = std::stoi(row[rank]);
    c.label = std::stoi(row[label]);
    c.max_cross_norm = parse_double(row[cross]);
    cells.push_back(c);
    if (centers)
      for (int a = 0; a < d; ++a) (*centers)(a, static_cast<Eigen::Index>(r)) = parse_double(row[table.column(coord_name("x", a))]);
  }
  return cells;
}

StrataReport make_strata_report(const StratumField& field, const DimensionAudit& audit) {
  StrataReport rep;
  rep.resolution = field.grid().resolution();
  rep.tie = field.tie();
  rep.tol_rank = field.tol_rank();
  for (int j = 0; j <= field.max_label(); ++j) rep.counts.push_back(field.count(j));
  for (int j = 2; j <= field.max_label(); ++j) rep.clusters.emplace_back(j, clusters(field, j));
  rep.audit = audit;
  rep.nested = field.nested();
  return rep;
}

void write_strata_report(const std::string& path, const StrataReport& rep) {
  YAML::Emitter out;
  begin(out, kStrataReportSchema);
  out << YAML::Key << "resolution" << YAML::Value << YAML::Flow << rep.resolution;
  out << YAML::Key << "tie" << YAML::Value << rep.tie;
  out << YAML::Key << "tol_rank" << YAML::Value << rep.tol_rank;
  out << YAML::Key << "nested" << YAML::Value << rep.nested;
  out << YAML::Key << "counts" << YAML::Value << YAML::Flow << rep.counts;
  out << YAML::Key << "clusters" << YAML::Value << YAML::BeginSeq;
  for (const auto& [label, list] : rep.clusters) {
    for (const auto& cl : list) {
      out << YAML::BeginMap << YAML::Key << "label" << YAML::Value << label << YAML::Key << "centroid" << YAML::Value
          << YAML::Flow << as_std(cl.centroid) << YAML::Key << "cells" << YAML::Value << YAML::Flow << cl.cells
          << YAML::EndMap;
    }
  }
  out << YAML::EndSeq;
  out << YAML::Key << "dimension_audit" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "noise" << YAML::Value << rep.audit.noise;
  out << YAML::Key << "passed" << YAML::Value << rep.audit.passed();
  out << YAML::Key << "closedness_witness" << YAML::Value;
  if (rep.audit.closedness_witness)
    out << *rep.audit.closedness_witness;
  else
    out << YAML::Null;
  out << YAML::Key << "estimates" << YAML::Value << YAML::BeginSeq;
  for (const auto& e : rep.audit.estimates) {
    out << YAML::BeginMap << YAML::Key << "stratum" << YAML::Value << e.stratum << YAML::Key << "spacings"
        << YAML::Value << YAML::Flow << e.spacings << YAML::Key << "counts" << YAML::Value << YAML::Flow << e.counts
        << YAML::Key << "dimension" << YAML::Value;
    if (e.dimension)
      out << *e.dimension;
    else
      out << YAML::Null;
    out << YAML::Key << "bound" << YAML::Value << e.bound << YAML::Key << "violates" << YAML::Value << e.violates
        << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  out << YAML::EndMap;
  write_text(path, out.c_str());
}

StrataReport read_strata_report(const std::string& path) {
  const YAML::Node root = parse_file(path);
  check_schema(root, kStrataReportSchema, path);
  StrataReport rep;
  rep.resolution = required<std::vector<int>>(root, "resolution", "strata report");
  rep.tie = required<double>(root, "tie", "strata report");
  rep.tol_rank = required<double>(root, "tol_rank", "strata report");
  rep.nested = required<bool>(root, "nested", "strata report");
  rep.counts = required<std::vector<std::size_t>>(root, "counts", "strata report");
  for (const auto& c : root["clusters"]) {
    const int label = required<int>(c, "label", "cluster");
    Cluster cl;
    cl.centroid = as_vector(required<std::vector<double>>(c, "centroid", "cluster"));
    cl.cells = required<std::vector<std::size_t>>(c, "cells", "cluster");
    if (rep.clusters.empty() || rep.clusters.back().first != label) rep.clusters.emplace_back(label, std::vector<Cluster>{});
    rep.clusters.back().second.push_back(std::move(cl));
  }
  const YAML::Node audit = root["dimension_audit"];
  rep.audit.noise = required<double>(audit, "noise", "dimension_audit");
  if (audit["closedness_witness"] && !audit["closedness_witness"].IsNull())
    rep.audit.closedness_witness = read_as<double>(audit["closedness_witness"], "closedness_witness");
  for (const auto& e : audit["estimates"]) {
    DimensionEstimate est;
    est.stratum = required<int>(e, "stratum", "estimate");
    est.spacings = required<std::vector<double>>(e, "spacings", "estimate");
    est.counts = required<std::vector<std::size_t>>(e, "counts", "estimate");
    if (e["dimension"] && !e["dimension"].IsNull()) est.dimension = read_as<double>(e["dimension"], "dimension");
    est.bound = required<double>(e, "bound", "estimate");
    est.violates = required<bool>(e, "violates", "estimate");
    rep.audit.estimates.push_back(std::move(est));
  }
  return rep;
}

// ---- uhs ----

void write_uhs(const std::string& report_path, const std::string& samples_path, const UHSReport& rep) {
  YAML::Emitter out;
  begin(out, kUHSReportSchema);
  out << YAML::Key << "region" << YAML::Value << rep.region;
  out << YAML::Key << "mode" << YAML::Value << to_string(rep.spec.mode);
  out << YAML::Key << "stratum" << YAML::Value << rep.spec.stratum;
  out << YAML::Key << "beta" << YAML::Value << rep.spec.beta;
  if (!rep.spec.weights.empty()) out << YAML::Key << "weights" << YAML::Value << YAML::Flow << rep.spec.weights;
  if (!rep.spec.order.empty()) out << YAML::Key << "order" << YAML::Value << YAML::Flow << rep.spec.order;
  out << YAML::Key << "sample_count" << YAML::Value << rep.samples.size();
  out << YAML::Key << "passed" << YAML::Value << rep.passed();
  out << YAML::Key << "failures" << YAML::Value << rep.failures;
  out << YAML::Key << "min_field_norm" << YAML::Value << rep.min_field_norm;
  out << YAML::Key << "min_ratio" << YAML::Value << rep.min_ratio;
  out << YAML::Key << "min_hull_distance" << YAML::Value << rep.min_hull_distance;
  out << YAML::Key << "property_c_violations" << YAML::Value << rep.property_c_violations;
  out << YAML::Key << "worst" << YAML::Value;
  if (rep.worst) {
    out << YAML::BeginMap << YAML::Key << "index" << YAML::Value << *rep.worst << YAML::Key << "x" << YAML::Value
        << YAML::Flow << as_std(rep.samples[*rep.worst].x) << YAML::EndMap;
  } else {
    out << YAML::Null;
  }
  out << YAML::EndMap;
  write_text(report_path, out.c_str());

  CsvTable table;
  table.schema = kUHSSamplesSchema;
  table.version = tool_version();
  const int d = rep.samples.empty() ? 0 : static_cast<int>(rep.samples.front().x.size());
  table.header.push_back("sample");
  for (int a = 0; a < d; ++a) table.header.push_back(coord_name("x", a));
  for (const char* c : {"field_norm", "integrand_norm", "ratio", "hull_distance", "max_direction_norm", "passed"})
    table.header.push_back(c);
  for (std::size_t k = 0; k < rep.samples.size(); ++k) {
    const auto& s = rep.samples[k];
    std::vector<std::string> row{std::to_string(k)};
    for (int a = 0; a < d; ++a) row.push_back(format_double(s.x[a]));
    for (double v : {s.field_norm, s.integrand_norm, s.ratio, s.hull_distance, s.max_direction_norm})
      row.push_back(format_double(v));
    row.push_back(s.passed ? "1" : "0");
    table.rows.push_back(std::move(row));
  }
  write_csv(samples_path, table);
}

UHSReport read_uhs(const std::string& report_path, const std::string& samples_path) {
  const YAML::Node root = parse_file(report_path);
  check_schema(root, kUHSReportSchema, report_path);
  UHSReport rep;
  rep.region = required<std::string>(root, "region", "uhs report");
  rep.spec.mode = flow_mode_from_string(required<std::string>(root, "mode", "uhs report"));
  rep.spec.stratum = required<int>(root, "stratum", "uhs report");
  rep.spec.beta = required<double>(root, "beta", "uhs report");
  if (root["weights"]) rep.spec.weights = read_as<std::vector<double>>(root["weights"], "weights");
  if (root["order"]) rep.spec.order = read_as<std::vector<double>>(root["order"], "order");
  rep.failures = required<std::size_t>(root, "failures", "uhs report");
  rep.min_field_norm = required<double>(root, "min_field_norm", "uhs report");
  rep.min_ratio = required<double>(root, "min_ratio", "uhs report");
  rep.min_hull_distance = required<double>(root, "min_hull_distance", "uhs report");
  rep.property_c_violations = required<std::size_t>(root, "property_c_violations", "uhs report");
  if (root["worst"] && !root["worst"].IsNull()) rep.worst = required<std::size_t>(root["worst"], "index", "worst");

  const CsvTable table = read_csv(samples_path);
  check_schema(table, kUHSSamplesSchema, samples_path);
  int d = 0;
  while (std::find(table.header.begin(), table.header.end(), coord_name("x", d)) != table.header.end()) ++d;
  for (const auto& row : table.rows) {
    UHSSample s;
    s.x.resize(d);
    for (int a = 0; a < d; ++a) s.x[a] = parse_double(row[table.column(coord_name("x", a))]);
    s.field_norm = parse_double(row[table.column("field_norm")]);
    s.integrand_norm = parse_double(row[table.column("integrand_norm")]);
    s.ratio = parse_double(row[table.column("ratio")]);
    s.hull_distance = parse_double(row[table.column("hull_distance")]);
    s.max_direction_norm = parse_double(row[table.column("max_direction_norm")]);
    s.passed = row[table.column("passed")] == "1";
    rep.samples.push_back(std::move(s));
  }
  if (rep.samples.size() != required<std::size_t>(root, "sample_count", "uhs report"))
    throw ValidationError("'" + samples_path + "' does not match the sample count of '" + report_path + "'");
  return rep;
}

// ---- flow ----

void write_flow(const std::string& trajectories_path, const std::string& omega_path, const std::string& report_path,
                const RegionFlow& flow, const FieldSpec& spec) {
  const int d = flow.trajectories.empty() ? 0 : static_cast<int>(flow.trajectories.front().seed.size());
  CsvTable traj;
  traj.schema = kTrajectorySchema;
  traj.version = tool_version();
  traj.header = {"seed_id", "t"};
  for (int a = 0; a < d; ++a) traj.header.push_back(coord_name("x", a));
  traj.header.push_back("u_min");
  for (int a = 0; a < d; ++a) traj.header.push_back(coord_name("v", a));

  CsvTable omega;
  omega.schema = kOmegaSchema;
  omega.version = tool_version();
  omega.header = {"seed_id"};
  for (int a = 0; a < d; ++a) omega.header.push_back(coord_name("x", a));
  omega.header.push_back("omega");
  omega.header.push_back("termination");
  for (int a = 0; a < d; ++a) omega.header.push_back(coord_name("end_x", a));
  for (const char* c : {"max_drift", "accepted_steps", "rejected_steps"}) omega.header.push_back(c);

  for (std::size_t id = 0; id < flow.trajectories.size(); ++id) {
    const auto& tr = flow.trajectories[id];
    for (const auto& s : tr.samples) {
      std::vector<std::string> row{std::to_string(id), format_double(s.t)};
      for (int a = 0; a < d; ++a) row.push_back(format_double(s.x[a]));
      row.push_back(format_double(s.gap));
      for (int a = 0; a < d; ++a) row.push_back(format_double(s.velocity[a]));
      traj.rows.push_back(std::move(row));
    }
    std::vector<std::string> row{std::to_string(id)};
    for (int a = 0; a < d; ++a) row.push_back(format_double(tr.seed[a]));
    row.push_back(format_double(tr.omega));
    row.push_back(to_string(tr.terminated_by));
    for (int a = 0; a < d; ++a) row.push_back(format_double(tr.endpoint[a]));
    row.push_back(format_double(tr.max_drift));
    row.push_back(std::to_string(tr.accepted_steps));
    row.push_back(std::to_string(tr.rejected_steps));
    omega.rows.push_back(std::move(row));
  }
  write_csv(trajectories_path, traj);
  write_csv(omega_path, omega);

  YAML::Emitter out;
  begin(out, kFlowReportSchema);
  out << YAML::Key << "mode" << YAML::Value << to_string(spec.mode);
  out << YAML::Key << "stratum" << YAML::Value << spec.stratum;
  out << YAML::Key << "beta" << YAML::Value << spec.beta;
  out << YAML::Key << "seeds" << YAML::Value << flow.trajectories.size();
  out << YAML::Key << "pole_reached" << YAML::Value << flow.pole_reached;
  out << YAML::Key << "failures" << YAML::Value << YAML::Flow << flow.failures;
  out << YAML::Key << "max_neighbor_ratio" << YAML::Value << flow.max_neighbor_ratio;
  out << YAML::Key << "median_neighbor_ratio" << YAML::Value << flow.median_neighbor_ratio;
  out << YAML::EndMap;
  write_text(report_path, out.c_str());
}

RegionFlow read_flow(const std::string& trajectories_path, const std::string& omega_path,
                     const std::string& report_path) {
  const CsvTable omega = read_csv(omega_path);
  check_schema(omega, kOmegaSchema, omega_path);
  const CsvTable traj = read_csv(trajectories_path);
  check_schema(traj, kTrajectorySchema, trajectories_path);
  int d = 0;
  while (std::find(omega.header.begin(), omega.header.end(), coord_name("x", d)) != omega.header.end()) ++d;

  RegionFlow flow;
  for (const auto& row : omega.rows) {
    Trajectory tr;
    tr.seed.resize(d);
    tr.endpoint.resize(d);
    for (int a = 0; a < d; ++a) {
      tr.seed[a] = parse_double(row[omega.column(coord_name("x", a))]);
      tr.endpoint[a] = parse_double(row[omega.column(coord_name("end_x", a))]);
    }
    tr.omega = parse_double(row[omega.column("omega")]);
    tr.terminated_by = termination_from_string(row[omega.column("termination")]);
    tr.max_drift = parse_double(row[omega.column("max_drift")]);
    tr.accepted_steps = std::stoi(row[omega.column("accepted_steps")]);
    tr.rejected_steps = std::stoi(row[omega.column("rejected_steps")]);
    flow.trajectories.push_back(std::move(tr));
  }
  const std::size_t id_col = traj.column("seed_id"), t_col = traj.column("t"), u_col = traj.column("u_min");
  for (const auto& row : traj.rows) {
    const auto id = static_cast<std::size_t>(std::stoul(row[id_col]));
    if (id >= flow.trajectories.size()) throw ValidationError("'" + trajectories_path + "' names an unknown seed");
    TrajectorySample s;
    s.t = parse_double(row[t_col]);
    s.gap = parse_double(row[u_col]);
    s.x.resize(d);
    s.velocity.resize(d);
    for (int a = 0; a < d; ++a) {
      s.x[a] = parse_double(row[traj.column(coord_name("x", a))]);
      s.velocity[a] = parse_double(row[traj.column(coord_name("v", a))]);
    }
    flow.trajectories[id].samples.push_back(std::move(s));
  }

  const YAML::Node root = parse_file(report_path);
  check_schema(root, kFlowReportSchema, report_path);
  flow.pole_reached = required<std::size_t>(root, "pole_reached", "flow report");
  flow.failures = required<std::vector<std::size_t>>(root, "failures", "flow report");
  flow.max_neighbor_ratio = required<double>(root, "max_neighbor_ratio", "flow report");
  flow.median_neighbor_ratio = required<double>(root, "median_neighbor_ratio", "flow report");
  return flow;
}

}  // namespace semicoupling::io
