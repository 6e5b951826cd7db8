#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "semicoupling/error.hpp"

namespace semicoupling::io {

/// 1-based line of a node, 0 when yaml-cpp has no mark for it.
int line_of(const YAML::Node& node);

[[noreturn]] void schema_fail(const YAML::Node& at, const std::string& key, const std::string& message);

/// Rejects keys of `map` outside `allowed`, naming the first offender.
void check_keys(const YAML::Node& map, std::initializer_list<const char*> allowed,
                const std::string& context);
void require_map(const YAML::Node& node, const std::string& key);

template <typename T>
T read_as(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    schema_fail(node, key, "value has the wrong type");
  }
}

template <typename T>
T required(const YAML::Node& map, const char* key, const std::string& context) {
  const YAML::Node node = map[key];
  if (!node) schema_fail(map, key, "missing required key in " + context);
  return read_as<T>(node, key);
}

template <typename T>
T optional_or(const YAML::Node& map, const char* key, T fallback) {
  const YAML::Node node = map[key];
  if (!node || node.IsNull()) return fallback;
  return read_as<T>(node, key);
}

YAML::Node parse_text(const std::string& text, const std::string& source_name);
YAML::Node parse_file(const std::string& path);

/// Emitter set up for bit-exact doubles.
void configure(YAML::Emitter& out);
void write_text(const std::string& path, const std::string& text);

}  // namespace semicoupling::io
