#include "io/yaml_util.hpp"

#include <fstream>
#include <sstream>

namespace semicoupling::io {

int line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

void schema_fail(const YAML::Node& at, const std::string& key, const std::string& message) {
  throw SchemaError(key, line_of(at), message);
}

void require_map(const YAML::Node& node, const std::string& key) {
  if (!node.IsMap()) schema_fail(node, key, "expected a mapping");
}

void check_keys(const YAML::Node& map, std::initializer_list<const char*> allowed,
                const std::string& context) {
  require_map(map, context);
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) schema_fail(kv.first, key, "unknown key in " + context);
  }
}

YAML::Node parse_text(const std::string& text, const std::string& source_name) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw SchemaError(source_name, e.mark.line + 1, e.msg);
  }
}

YAML::Node parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

void configure(YAML::Emitter& out) {
  out.SetDoublePrecision(17);
  out.SetFloatPrecision(9);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

}  // namespace semicoupling::io
