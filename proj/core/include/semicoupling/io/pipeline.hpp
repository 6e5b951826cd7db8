#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semicoupling/io/config.hpp"

namespace semicoupling::io {

inline constexpr const char* kManifestSchema = "semicoupling/manifest/1";

struct FileRecord {
  std::string name;
  /// Data rows for CSV files, 1 for reports.
  std::size_t rows = 0;
  std::string sha256;
};

struct StageRecord {
  std::string name;
  std::vector<FileRecord> files;
  double seconds = 0.0;
};

struct RunManifest {
  std::string tool_version;
  /// SHA-256 of the resolved configuration and seed.
  std::string input_hash;
  std::uint64_t seed = 0;
  std::vector<StageRecord> stages;
  std::optional<std::string> failed_stage;
  std::string error;

  bool ok() const { return !failed_stage; }
  const StageRecord* stage(const std::string& name) const;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

/// Runs the given stages in order into config.out_dir. Each stage reads only
/// the files its predecessors wrote. A failing stage stops the run; the
/// manifest then names it and carries the error. The manifest is merged
/// with an existing one of the same input hash and written to
/// out_dir/manifest.yaml.
RunManifest run_stages(const RunConfig& config, const std::vector<Stage>& stages);
RunManifest run_pipeline(const RunConfig& config);

}  // namespace semicoupling::io
