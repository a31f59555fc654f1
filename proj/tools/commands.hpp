#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mnfret::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitIo = 3,
  kExitNumerical = 4,
  kExitPartialSweep = 5,
};

struct SynthOptions {
  std::filesystem::path config;  // empty: built-in default scene
  std::filesystem::path out;
  std::size_t orbits = 4;
  std::size_t train_orbits = 3;
  std::optional<std::uint64_t> seed;
};

struct FitOptions {
  std::string method;
  std::vector<std::filesystem::path> train;
  std::size_t k = 0;
  double ridge = 1e-10;
  std::string noise_scaling = "unit";
  std::filesystem::path out;
};

struct RetrieveOptions {
  std::filesystem::path basis;
  std::optional<std::filesystem::path> model;
  std::vector<std::filesystem::path> cubes;
  std::vector<std::filesystem::path> targets;
  std::optional<std::size_t> window;
  std::optional<std::size_t> k;
  double ridge = 0.0;
  std::string padding = "mirror";
  std::filesystem::path out;
};

struct SweepCommandOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  unsigned jobs = 1;
  bool resume = false;
  bool no_timing = false;
};

struct ExportOptions {
  std::filesystem::path basis;
  std::filesystem::path cube;
  std::string indices;
  std::optional<std::size_t> row_begin;
  std::optional<std::size_t> row_end;
  std::filesystem::path out;
};

// Each command throws mnfret::Error subclasses on failure; the caller maps
// them to exit codes.
int cmd_synth(const SynthOptions& options);
int cmd_fit(const FitOptions& options);
int cmd_retrieve(const RetrieveOptions& options);
int cmd_sweep(const SweepCommandOptions& options);
int cmd_export_components(const ExportOptions& options);

/// "0-49", "0,3,7" or a mix such as "0-4,9".
std::vector<std::size_t> parse_indices(const std::string& text);

}  // namespace mnfret::cli
