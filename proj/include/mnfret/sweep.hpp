#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mnfret/cube.hpp"
#include "mnfret/decomposition.hpp"
#include "mnfret/evaluation.hpp"
#include "mnfret/features.hpp"
#include "mnfret/synth.hpp"

namespace mnfret {

/// Whole-cube train/test split: bases and regressions only ever see the
/// training cubes.
struct Dataset {
  std::vector<SpectralCube> train_spectra;
  std::vector<ProfileCube> train_profiles;
  std::vector<SpectralCube> test_spectra;
  std::vector<ProfileCube> test_profiles;

  /// Throws UsageError if the cubes are not mutually compatible.
  void validate() const;
};

/// Orbits 0..train_orbits-1 for training, the rest for testing.
Dataset synthetic_dataset(const SceneConfig& base, std::size_t orbits, std::size_t train_orbits);

struct SweepOptions {
  std::vector<Method> methods{Method::pca, Method::mnf};
  std::vector<std::size_t> k_grid{5, 10, 20};
  std::vector<std::size_t> w_grid{1, 3};
  double regression_ridge = 0.0;
  double mnf_ridge = kDefaultMnfRidge;
  NoiseScaling noise_scaling = NoiseScaling::raw;
  Padding padding = Padding::mirror;
  /// Also emit training-split rows.
  bool include_train = false;
  /// Emit the Gaussian information proxy per (method, k).
  bool information = true;
  double information_shrinkage = kDefaultInformationShrinkage;
  /// Record wall time per cell; when false wall_ms is written as 0.
  bool timing = true;
};

struct SweepRow {
  Method method = Method::pca;
  std::size_t k = 0;
  std::size_t w = 1;
  std::uint64_t seed = 0;
  std::string split = "test";
  double mean_rmse = 0.0;
  std::vector<double> level_rmse;
  double wall_ms = 0.0;
};

/// Gaussian information of test-split scores and targets.
struct InformationRow {
  Method method = Method::pca;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double joint = 0.0;
  double inputs = 0.0;
};

struct CellFailure {
  Method method = Method::pca;
  std::size_t k = 0;
  std::size_t w = 1;
  std::uint64_t seed = 0;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<InformationRow> information;
  std::vector<CellFailure> failures;
  std::vector<double> pressure_axis;

  /// Sorts rows by (method, k, w, seed, split) so output is order-independent.
  void canonicalize();
};

/// Result rows already computed; these cells are skipped.
struct CompletedCells {
  std::vector<SweepRow> rows;
  std::vector<InformationRow> information;
  std::vector<double> pressure_axis;
};

/// For each method: fits the basis once at max(k) on the training cubes,
/// then for each k and w extracts features, fits the regression on the
/// training cubes and scores the test cubes. Cell errors are collected in
/// `failures`, annotated with the cell.
SweepResult run_sweep(const Dataset& data, const SweepOptions& options, std::uint64_t seed,
                      const CompletedCells* completed = nullptr);

/// Sweep over seeds: either a synthetic scene regenerated per seed, or a
/// fixed set of cube files.
struct SweepConfig {
  SweepOptions options;
  std::vector<std::uint64_t> seeds{0};
  /// Template scene; for seed s both `seed` and `mixing_seed` are set to s.
  std::optional<SceneConfig> scene;
  std::size_t orbits = 4;
  std::size_t train_orbits = 3;
  struct CubePair {
    std::filesystem::path spectra;
    std::filesystem::path profiles;
  };
  std::vector<CubePair> train_files;
  std::vector<CubePair> test_files;

  std::size_t cell_count() const {
    return options.methods.size() * options.k_grid.size() * options.w_grid.size() * seeds.size();
  }
};

/// Unknown keys and type errors raise UsageError naming the field.
SweepConfig sweep_config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json sweep_config_to_json(const SweepConfig& config);

/// Runs every (seed, method) group on up to `jobs` threads; the result does
/// not depend on `jobs`.
SweepResult run_experiment(const SweepConfig& config, unsigned jobs,
                           const CompletedCells* completed = nullptr);

// CSV surfaces (UTF-8, '.' decimals, LF newlines).
inline constexpr const char* kSweepCsvHeader = "method,k,w,seed,split,mean_rmse,wall_ms";
inline constexpr const char* kLevelCsvHeader = "method,k,w,seed,level,pressure,rmse";
inline constexpr const char* kInformationCsvHeader =
    "method,k,seed,total_correlation,input_total_correlation,conditional_total_correlation";

std::string sweep_csv(const SweepResult& result);
/// Test split only.
std::string level_csv(const SweepResult& result);
std::string information_csv(const SweepResult& result);

/// Reads back sweep.csv + levels.csv + information.csv from a sweep output
/// directory; missing files yield empty lists.
CompletedCells read_completed_cells(const std::filesystem::path& dir);

/// Earlier rows overlaid with fresh ones; a fresh row replaces an earlier row
/// with the same (method, k, w, seed, split).
SweepResult merge_results(const CompletedCells& earlier, SweepResult fresh);

/// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace mnfret
