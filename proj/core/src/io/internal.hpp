#pragma once

#include <yaml-cpp/yaml.h>

#include "semicoupling/io/problem_io.hpp"

namespace semicoupling::io::detail {

ProblemSpec parse_problem_node(const YAML::Node& node);
void emit_problem(YAML::Emitter& out, const ProblemSpec& spec);
Tolerances parse_tolerances(const YAML::Node& node, Tolerances base);
void emit_tolerances(YAML::Emitter& out, const Tolerances& tol);

}  // namespace semicoupling::io::detail
