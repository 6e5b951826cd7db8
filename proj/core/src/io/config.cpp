#include "semicoupling/io/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "io/internal.hpp"
#include "io/yaml_util.hpp"

namespace semicoupling::io {

namespace fs = std::filesystem;

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::solve: return "solve";
    case Stage::strata: return "strata";
    case Stage::uhs: return "uhs";
    case Stage::flow: return "flow";
  }
  return "unknown";
}

Stage stage_from_string(const std::string& name) {
  for (Stage s : all_stages())
    if (to_string(s) == name) return s;
  throw ValidationError("unknown stage '" + name + "'");
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages{Stage::solve, Stage::strata, Stage::uhs, Stage::flow};
  return stages;
}

SeedSpec parse_seed_spec(const std::string& text) {
  SeedSpec out;
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("seed spec '" + text + "' needs grid:NxM or file:path");
  out.kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (out.kind == "file") {
    if (rest.empty()) throw ValidationError("seed spec '" + text + "' has no file");
    out.file = rest;
    out.counts.clear();
    return out;
  }
  if (out.kind != "grid") throw ValidationError("seed spec kind '" + out.kind + "' must be grid or file");
  out.counts.clear();
  std::stringstream ss(rest);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(part, &used);
      if (used != part.size() || n < 1) throw std::invalid_argument(part);
      out.counts.push_back(n);
    } catch (const std::exception&) {
      throw ValidationError("seed spec '" + text + "' has a bad count '" + part + "'");
    }
  }
  if (out.counts.empty()) throw ValidationError("seed spec '" + text + "' has no counts");
  return out;
}

std::string to_string(const SeedSpec& seeds) {
  if (seeds.kind == "file") return "file:" + seeds.file;
  std::string out = "grid:";
  for (std::size_t k = 0; k < seeds.counts.size(); ++k) out += (k ? "x" : "") + std::to_string(seeds.counts[k]);
  return out;
}

std::vector<int> RunConfig::resolved_strata_resolutions() const {
  if (!strata_resolutions.empty()) return strata_resolutions;
  const int r = *std::min_element(problem.resolution.begin(), problem.resolution.end());
  return {std::max(2, r / 4), std::max(2, r / 2), r};
}

std::string RunConfig::resolve(const std::string& path) const {
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base_dir) / p).lexically_normal().string();
}

namespace {

void parse_field(const YAML::Node& node, FieldSpec& field) {
  check_keys(node, {"mode", "stratum", "beta", "weights", "order"}, "field");
  if (node["mode"]) {
    try {
      field.mode = flow_mode_from_string(read_as<std::string>(node["mode"], "mode"));
    } catch (const ValidationError& e) {
      schema_fail(node["mode"], "mode", e.what());
    }
  }
  field.stratum = optional_or(node, "stratum", field.stratum);
  field.beta = optional_or(node, "beta", field.beta);
  if (node["weights"]) field.weights = read_as<std::vector<double>>(node["weights"], "weights");
  if (node["order"]) field.order = read_as<std::vector<double>>(node["order"], "order");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir, const std::string& source_name) {
  const YAML::Node root = parse_text(text, source_name);
  check_keys(root, {"problem", "problem_file", "stages", "seed", "out_dir", "solve", "strata", "field", "uhs", "flow"},
             "config");
  RunConfig cfg;
  cfg.base_dir = base_dir;
  if (root["problem"] && root["problem_file"]) schema_fail(root["problem_file"], "problem_file", "give problem or problem_file, not both");
  if (root["problem"]) {
    cfg.problem = detail::parse_problem_node(root["problem"]);
  } else if (root["problem_file"]) {
    cfg.problem_file = read_as<std::string>(root["problem_file"], "problem_file");
    const std::string path = cfg.resolve(*cfg.problem_file);
    if (!fs::exists(path)) schema_fail(root["problem_file"], "problem_file", "file '" + path + "' does not exist");
    cfg.problem = load_problem_spec(path);
  } else {
    schema_fail(root, "problem", "missing required key in config");
  }

  if (const YAML::Node stages = root["stages"]) {
    cfg.stages.clear();
    for (const auto& s : read_as<std::vector<std::string>>(stages, "stages")) {
      try {
        cfg.stages.push_back(stage_from_string(s));
      } catch (const ValidationError& e) {
        schema_fail(stages, "stages", e.what());
      }
    }
    const auto& all = all_stages();
    if (cfg.stages.empty() || cfg.stages.size() > all.size() || !std::equal(cfg.stages.begin(), cfg.stages.end(), all.begin()))
      schema_fail(stages, "stages", "must be a prefix of [solve, strata, uhs, flow]");
  }
  cfg.seed = optional_or<std::uint64_t>(root, "seed", 0);
  cfg.out_dir = optional_or<std::string>(root, "out_dir", cfg.out_dir);

  if (const YAML::Node solve = root["solve"]) {
    check_keys(solve, {"max_iters", "polish_iters"}, "solve");
    cfg.max_iters = optional_or(solve, "max_iters", cfg.max_iters);
    cfg.polish_iters = optional_or(solve, "polish_iters", cfg.polish_iters);
  }
  if (const YAML::Node strata = root["strata"]) {
    check_keys(strata, {"resolutions"}, "strata");
    cfg.strata_resolutions = optional_or(strata, "resolutions", cfg.strata_resolutions);
  }
  cfg.field.order = cfg.problem.order;
  if (cfg.problem.quad_weights) cfg.field.weights = *cfg.problem.quad_weights;
  if (const YAML::Node field = root["field"]) parse_field(field, cfg.field);
  if (const YAML::Node uhs = root["uhs"]) {
    check_keys(uhs, {"samples_per_axis", "max_samples"}, "uhs");
    cfg.uhs_samples_per_axis = optional_or(uhs, "samples_per_axis", cfg.uhs_samples_per_axis);
    cfg.uhs_max_samples = optional_or(uhs, "max_samples", cfg.uhs_max_samples);
  }
  if (const YAML::Node flow = root["flow"]) {
    check_keys(flow, {"seeds", "max_seeds", "force"}, "flow");
    if (flow["seeds"]) {
      try {
        cfg.seeds = parse_seed_spec(read_as<std::string>(flow["seeds"], "seeds"));
      } catch (const ValidationError& e) {
        schema_fail(flow["seeds"], "seeds", e.what());
      }
    }
    cfg.max_seeds = optional_or(flow, "max_seeds", cfg.max_seeds);
    cfg.force = optional_or(flow, "force", cfg.force);
  }
  try {
    validate_config(cfg);
  } catch (const SchemaError&) {
    throw;
  } catch (const AbundanceError&) {
    throw;
  } catch (const ValidationError& e) {
    throw SchemaError("config", 0, e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const fs::path parent = fs::path(path).parent_path();
  return parse_config(buf.str(), parent.empty() ? "." : parent.string(), path);
}

void validate_config(const RunConfig& cfg) {
  const int n = static_cast<int>(cfg.problem.points.cols());
  cfg.field.validate(n);
  if (cfg.max_iters < 1) throw ValidationError("solve.max_iters must be positive");
  if (cfg.polish_iters < 0) throw ValidationError("solve.polish_iters must be nonnegative");
  for (int r : cfg.strata_resolutions)
    if (r < 2) throw ValidationError("strata.resolutions entries must be at least 2");
  if (cfg.uhs_samples_per_axis < 2) throw ValidationError("uhs.samples_per_axis must be at least 2");
  if (cfg.uhs_max_samples < 1 || cfg.max_seeds < 1) throw ValidationError("sample caps must be positive");
  if (cfg.seeds.kind == "grid" && cfg.seeds.counts.size() != 1 &&
      static_cast<int>(cfg.seeds.counts.size()) != cfg.problem.box.dimension())
    throw ValidationError("flow.seeds grid needs one count or one per axis");
  if (cfg.seeds.kind == "file" && !fs::exists(cfg.resolve(cfg.seeds.file)))
    throw ValidationError("flow.seeds file '" + cfg.resolve(cfg.seeds.file) + "' does not exist");
  // Abundance and sample checks.
  (void)build_problem(cfg.problem);
}

std::string emit_config(const RunConfig& cfg) {
  YAML::Emitter out;
  configure(out);
  out << YAML::BeginMap;
  out << YAML::Key << "problem" << YAML::Value;
  detail::emit_problem(out, cfg.problem);
  out << YAML::Key << "stages" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Stage s : cfg.stages) out << to_string(s);
  out << YAML::EndSeq;
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "out_dir" << YAML::Value << cfg.out_dir;
  out << YAML::Key << "solve" << YAML::Value << YAML::BeginMap << YAML::Key << "max_iters" << YAML::Value
      << cfg.max_iters << YAML::Key << "polish_iters" << YAML::Value << cfg.polish_iters << YAML::EndMap;
  out << YAML::Key << "strata" << YAML::Value << YAML::BeginMap << YAML::Key << "resolutions" << YAML::Value
      << YAML::Flow << cfg.resolved_strata_resolutions() << YAML::EndMap;
  out << YAML::Key << "field" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << to_string(cfg.field.mode);
  out << YAML::Key << "stratum" << YAML::Value << cfg.field.stratum;
  out << YAML::Key << "beta" << YAML::Value << cfg.field.beta;
  if (!cfg.field.weights.empty()) out << YAML::Key << "weights" << YAML::Value << YAML::Flow << cfg.field.weights;
  if (!cfg.field.order.empty()) out << YAML::Key << "order" << YAML::Value << YAML::Flow << cfg.field.order;
  out << YAML::EndMap;
  out << YAML::Key << "uhs" << YAML::Value << YAML::BeginMap << YAML::Key << "samples_per_axis" << YAML::Value
      << cfg.uhs_samples_per_axis << YAML::Key << "max_samples" << YAML::Value << cfg.uhs_max_samples << YAML::EndMap;
  out << YAML::Key << "flow" << YAML::Value << YAML::BeginMap << YAML::Key << "seeds" << YAML::Value
      << to_string(cfg.seeds) << YAML::Key << "max_seeds" << YAML::Value << cfg.max_seeds << YAML::Key << "force"
      << YAML::Value << cfg.force << YAML::EndMap;
  out << YAML::EndMap;
  return out.c_str();
}

}  // namespace semicoupling::io
