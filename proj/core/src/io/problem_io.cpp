#include "semicoupling/io/problem_io.hpp"

#include <cmath>

#include "io/internal.hpp"
#include "io/yaml_util.hpp"

namespace semicoupling::io {

namespace detail {

namespace {

Vector read_vector(const YAML::Node& node, const char* key, int expected) {
  const auto v = read_as<std::vector<double>>(node, key);
  if (expected >= 0 && static_cast<int>(v.size()) != expected)
    schema_fail(node, key, "expected " + std::to_string(expected) + " entries");
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> as_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

Tolerances parse_tolerances(const YAML::Node& node, Tolerances tol) {
  check_keys(node, {"tol_mass", "tol_tie", "tie_scale", "tol_rank", "tol_twist", "eps_stop", "eps_uhs",
                    "max_flow_time", "ode_rel_err"},
             "tolerances");
  tol.tol_mass = optional_or(node, "tol_mass", tol.tol_mass);
  if (node["tol_tie"] && !node["tol_tie"].IsNull()) tol.tol_tie = read_as<double>(node["tol_tie"], "tol_tie");
  tol.tie_scale = optional_or(node, "tie_scale", tol.tie_scale);
  tol.tol_rank = optional_or(node, "tol_rank", tol.tol_rank);
  tol.tol_twist = optional_or(node, "tol_twist", tol.tol_twist);
  tol.eps_stop = optional_or(node, "eps_stop", tol.eps_stop);
  tol.eps_uhs = optional_or(node, "eps_uhs", tol.eps_uhs);
  tol.max_flow_time = optional_or(node, "max_flow_time", tol.max_flow_time);
  tol.ode_rel_err = optional_or(node, "ode_rel_err", tol.ode_rel_err);
  try {
    tol.validate();
  } catch (const ValidationError& e) {
    schema_fail(node, "tolerances", e.what());
  }
  return tol;
}

void emit_tolerances(YAML::Emitter& out, const Tolerances& tol) {
  out << YAML::BeginMap;
  out << YAML::Key << "tol_mass" << YAML::Value << tol.tol_mass;
  if (tol.tol_tie) out << YAML::Key << "tol_tie" << YAML::Value << *tol.tol_tie;
  out << YAML::Key << "tie_scale" << YAML::Value << tol.tie_scale;
  out << YAML::Key << "tol_rank" << YAML::Value << tol.tol_rank;
  out << YAML::Key << "tol_twist" << YAML::Value << tol.tol_twist;
  out << YAML::Key << "eps_stop" << YAML::Value << tol.eps_stop;
  out << YAML::Key << "eps_uhs" << YAML::Value << tol.eps_uhs;
  out << YAML::Key << "max_flow_time" << YAML::Value << tol.max_flow_time;
  out << YAML::Key << "ode_rel_err" << YAML::Value << tol.ode_rel_err;
  out << YAML::EndMap;
}

ProblemSpec parse_problem_node(const YAML::Node& node) {
  check_keys(node, {"name", "dimension", "box", "resolution", "density", "target", "cost", "tolerances"},
             "problem");
  ProblemSpec spec;
  spec.name = optional_or<std::string>(node, "name", "");
  const int d = required<int>(node, "dimension", "problem");
  if (d < 1) schema_fail(node["dimension"], "dimension", "must be at least 1");

  const YAML::Node box = node["box"];
  if (!box) schema_fail(node, "box", "missing required key in problem");
  check_keys(box, {"lo", "hi"}, "box");
  if (!box["lo"] || !box["hi"]) schema_fail(box, "box", "needs lo and hi");
  spec.box.lo = read_vector(box["lo"], "lo", d);
  spec.box.hi = read_vector(box["hi"], "hi", d);
  if (!((spec.box.hi - spec.box.lo).array() > 0.0).all()) schema_fail(box, "box", "hi must exceed lo");

  const YAML::Node res = node["resolution"];
  if (!res) schema_fail(node, "resolution", "missing required key in problem");
  if (res.IsSequence())
    spec.resolution = read_as<std::vector<int>>(res, "resolution");
  else
    spec.resolution = {read_as<int>(res, "resolution")};
  if (spec.resolution.size() != 1 && static_cast<int>(spec.resolution.size()) != d)
    schema_fail(res, "resolution", "expected one entry or one per axis");
  for (int r : spec.resolution)
    if (r < 2) schema_fail(res, "resolution", "every axis needs at least 2 cells");

  if (const YAML::Node dens = node["density"]) {
    check_keys(dens, {"kind", "value", "mean", "sigma", "scale", "values"}, "density");
    spec.density.kind = optional_or<std::string>(dens, "kind", "constant");
    if (spec.density.kind == "constant") {
      spec.density.value = optional_or(dens, "value", 1.0);
    } else if (spec.density.kind == "gaussian") {
      if (!dens["mean"]) schema_fail(dens, "mean", "missing required key in density");
      spec.density.mean = as_std(read_vector(dens["mean"], "mean", d));
      spec.density.sigma = required<double>(dens, "sigma", "density");
      spec.density.scale = optional_or(dens, "scale", 1.0);
      if (!(spec.density.sigma > 0.0)) schema_fail(dens["sigma"], "sigma", "must be positive");
    } else if (spec.density.kind == "table") {
      spec.density.values = required<std::vector<double>>(dens, "values", "density");
      std::size_t cells = 1;
      for (int a = 0; a < d; ++a)
        cells *= static_cast<std::size_t>(spec.resolution.size() == 1 ? spec.resolution[0] : spec.resolution[a]);
      if (spec.density.values.size() != cells)
        schema_fail(dens["values"], "values", "expected " + std::to_string(cells) + " samples");
    } else {
      schema_fail(dens["kind"], "kind", "unknown density kind '" + spec.density.kind + "'");
    }
  }

  const YAML::Node target = node["target"];
  if (!target) schema_fail(node, "target", "missing required key in problem");
  check_keys(target, {"points", "masses", "quad_weights", "order"}, "target");
  const YAML::Node points = target["points"];
  if (!points || !points.IsSequence() || points.size() == 0) schema_fail(target, "points", "needs a list of points");
  spec.points.resize(d, static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) spec.points.col(static_cast<Eigen::Index>(k)) = read_vector(points[k], "points", d);
  spec.masses = required<std::vector<double>>(target, "masses", "target");
  if (spec.masses.size() != points.size()) schema_fail(target["masses"], "masses", "one mass per point");
  if (target["quad_weights"]) {
    spec.quad_weights = read_as<std::vector<double>>(target["quad_weights"], "quad_weights");
    if (spec.quad_weights->size() != points.size())
      schema_fail(target["quad_weights"], "quad_weights", "one weight per point");
  }
  if (target["order"]) {
    spec.order = read_as<std::vector<double>>(target["order"], "order");
    if (spec.order.size() != points.size()) schema_fail(target["order"], "order", "one order per point");
  }

  if (const YAML::Node cost = node["cost"]) {
    check_keys(cost, {"kind", "offset"}, "cost");
    const auto kind = optional_or<std::string>(cost, "kind", "quadratic");
    if (kind == "quadratic") {
      spec.cost.kind = CostKind::quadratic;
    } else if (kind == "log_repulsive") {
      spec.cost.kind = CostKind::log_repulsive;
      if (cost["offset"]) spec.cost.offset = read_as<double>(cost["offset"], "offset");
    } else {
      schema_fail(cost["kind"], "kind", "unknown cost kind '" + kind + "'");
    }
  }
  if (const YAML::Node tol = node["tolerances"]) spec.tolerances = parse_tolerances(tol, {});
  return spec;
}

void emit_problem(YAML::Emitter& out, const ProblemSpec& spec) {
  const int d = spec.box.dimension();
  out << YAML::BeginMap;
  if (!spec.name.empty()) out << YAML::Key << "name" << YAML::Value << spec.name;
  out << YAML::Key << "dimension" << YAML::Value << d;
  out << YAML::Key << "box" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "lo" << YAML::Value << YAML::Flow << as_std(spec.box.lo);
  out << YAML::Key << "hi" << YAML::Value << YAML::Flow << as_std(spec.box.hi);
  out << YAML::EndMap;
  out << YAML::Key << "resolution" << YAML::Value << YAML::Flow << spec.resolution;
  out << YAML::Key << "density" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << spec.density.kind;
  if (spec.density.kind == "constant") out << YAML::Key << "value" << YAML::Value << spec.density.value;
  if (spec.density.kind == "gaussian") {
    out << YAML::Key << "mean" << YAML::Value << YAML::Flow << spec.density.mean;
    out << YAML::Key << "sigma" << YAML::Value << spec.density.sigma;
    out << YAML::Key << "scale" << YAML::Value << spec.density.scale;
  }
  if (spec.density.kind == "table") out << YAML::Key << "values" << YAML::Value << YAML::Flow << spec.density.values;
  out << YAML::EndMap;
  out << YAML::Key << "target" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
  for (Eigen::Index k = 0; k < spec.points.cols(); ++k) out << YAML::Flow << as_std(spec.points.col(k));
  out << YAML::EndSeq;
  out << YAML::Key << "masses" << YAML::Value << YAML::Flow << spec.masses;
  if (spec.quad_weights) out << YAML::Key << "quad_weights" << YAML::Value << YAML::Flow << *spec.quad_weights;
  if (!spec.order.empty()) out << YAML::Key << "order" << YAML::Value << YAML::Flow << spec.order;
  out << YAML::EndMap;
  out << YAML::Key << "cost" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(spec.cost.kind);
  if (spec.cost.offset) out << YAML::Key << "offset" << YAML::Value << *spec.cost.offset;
  out << YAML::EndMap;
  out << YAML::Key << "tolerances" << YAML::Value;
  emit_tolerances(out, spec.tolerances);
  out << YAML::EndMap;
}

}  // namespace detail

ProblemSpec parse_problem_spec(const std::string& text, const std::string& source_name) {
  const YAML::Node root = parse_text(text, source_name);
  return detail::parse_problem_node(root["problem"] ? root["problem"] : root);
}

ProblemSpec load_problem_spec(const std::string& path) {
  const YAML::Node root = parse_file(path);
  return detail::parse_problem_node(root["problem"] ? root["problem"] : root);
}

std::string emit_problem_spec(const ProblemSpec& spec) {
  YAML::Emitter out;
  configure(out);
  detail::emit_problem(out, spec);
  return out.c_str();
}

DensityFunction make_density(const ProblemSpec& spec) {
  const DensitySpec dens = spec.density;
  if (dens.kind == "constant") return [v = dens.value](const VectorRef&) { return v; };
  if (dens.kind == "gaussian") {
    const Vector mean = Eigen::Map<const Vector>(dens.mean.data(), static_cast<Eigen::Index>(dens.mean.size()));
    return [mean, s = dens.sigma, a = dens.scale](const VectorRef& x) {
      return a * std::exp(-(x - mean).squaredNorm() / (2.0 * s * s));
    };
  }
  return {};
}

CostPtr make_cost(const ProblemSpec& spec) {
  if (spec.cost.kind == CostKind::log_repulsive)
    return make_log_repulsive_cost(spec.cost.offset.value_or(std::log(spec.box.diameter())));
  if (spec.cost.kind == CostKind::quadratic) return make_quadratic_cost();
  throw ValidationError("problem files cannot describe user-supplied costs");
}

Problem build_problem(const ProblemSpec& spec) {
  SourceMeasure source = [&] {
    if (spec.density.kind == "table") return SourceMeasure(Grid(spec.box, spec.resolution), spec.density.values);
    return make_source(spec.box, spec.resolution, make_density(spec));
  }();
  TargetMeasure target(spec.points, spec.masses, spec.quad_weights);
  return Problem(std::move(source), std::move(target), make_cost(spec), spec.tolerances);
}

}  // namespace semicoupling::io
