#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mnfret::cli {

inline constexpr const char* kToolVersion = "mnf-retrieve 0.1.0";

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
/// Hex SHA-256 over several files, in order.
std::string sha256_files(const std::vector<std::filesystem::path>& paths);

/// manifest.json written once per output directory.
struct RunManifest {
  std::string subcommand;
  nlohmann::ordered_json config;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  std::uint64_t seed = 0;

  void write(const std::filesystem::path& out_dir) const;
};

}  // namespace mnfret::cli
