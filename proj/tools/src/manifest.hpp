#pragma once

// Run manifest: what produced an output file, from which input, when.

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

namespace powergain::cli {

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::string dataset_path;
  std::string dataset_sha256;  ///< hex digest of the raw input bytes; empty if no dataset
  std::optional<std::uint64_t> seed;
  std::string version;
  std::string timestamp;  ///< UTC, ISO 8601
};

std::string sha256_hex(const std::string& bytes);
std::string utc_timestamp();

nlohmann::json to_json(const RunManifest& m);

/// Writes `<output_path>.manifest.json` next to the output file.
void write_sidecar(const RunManifest& m, const std::string& output_path);

}  // namespace powergain::cli
