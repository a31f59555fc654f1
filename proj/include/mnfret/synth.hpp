#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mnfret/cube.hpp"

namespace mnfret {

/// Rectangle of pixels whose noise std is multiplied by `noise_factor`.
struct CloudPatch {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double noise_factor = 1.0;
};

struct SceneConfig {
  std::size_t rows = 128;
  std::size_t cols = 32;
  std::size_t bands = 64;
  std::size_t levels = 16;
  std::size_t latent_count = 24;
  /// Squared-exponential smoothing length of the latent fields, in pixels.
  /// Zero leaves them white.
  double length_scale = 4.0;
  /// Amplitude of latent j is latent_decay^j.
  double latent_decay = 0.85;
  /// Std of the entries of the latent-to-band mixing matrix.
  double mixing_scale = 0.5;
  std::uint64_t mixing_seed = 1;
  /// Per-band noise std; empty selects structured_noise_profile(bands).
  std::vector<double> noise_std;
  bool spatially_correlated_noise = false;
  double nonlinearity = 0.1;
  std::uint64_t seed = 0;
  std::optional<CloudPatch> cloud;

  /// Throws UsageError naming the offending field.
  void validate() const;
  std::vector<double> resolved_noise_std() const;
};

/// Low noise over most of the spectrum rising steeply towards the last bands,
/// so that several pure-noise directions out-vary the weaker signal.
std::vector<double> structured_noise_profile(std::size_t bands);

/// Log-spaced levels from 1000 hPa down to 10 hPa.
std::vector<double> default_pressure_axis(std::size_t levels);

struct SyntheticScene {
  SpectralCube spectra;
  ProfileCube profiles;
  /// rows x cols x latent_count, amplitudes applied.
  Cube latents;
  /// The additive noise realization included in `spectra`.
  Cube noise;
};

/// Same config gives bit-identical output. The latent fields and the noise
/// come from `seed`; the mixing and profile loadings come from `mixing_seed`,
/// so orbits that share a mixing seed share the forward model.
SyntheticScene generate_scene(const SceneConfig& config);

/// Config of orbit `index` in a multi-orbit set: same forward model, latent
/// and noise seed derived from `base.seed` and the index.
SceneConfig orbit_config(const SceneConfig& base, std::size_t index);

/// Unknown keys and type errors raise UsageError naming the field.
SceneConfig scene_config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json scene_config_to_json(const SceneConfig& config);

}  // namespace mnfret
