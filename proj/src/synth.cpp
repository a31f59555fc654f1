#include "mnfret/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "mnfret/error.hpp"

namespace mnfret {

namespace {

constexpr unsigned kLatentStream = 1;
constexpr unsigned kMixingStream = 2;
constexpr unsigned kNoiseStream = 3;

std::mt19937_64 make_stream(std::uint64_t seed, unsigned stream) {
  std::seed_seq seq{static_cast<unsigned>(seed & 0xffffffffu), static_cast<unsigned>(seed >> 32),
                    stream};
  return std::mt19937_64(seq);
}

/// Symmetric Gaussian taps normalized to unit energy, so filtering white
/// noise with them (separably, in 2-D) keeps unit variance.
std::vector<double> smoothing_taps(double length_scale) {
  if (length_scale <= 0.0) return {1.0};
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(3.0 * length_scale));
  std::vector<double> taps;
  double energy = 0.0;
  for (std::ptrdiff_t t = -half; t <= half; ++t) {
    const double g = std::exp(-static_cast<double>(t * t) / (2.0 * length_scale * length_scale));
    taps.push_back(g);
    energy += g * g;
  }
  for (auto& g : taps) g /= std::sqrt(energy);
  return taps;
}

/// Unit-variance smooth random field on a rows x cols grid. White noise is
/// drawn on a grid padded by the filter half-width so that no boundary
/// treatment is needed.
std::vector<double> smooth_field(std::size_t rows, std::size_t cols,
                                 const std::vector<double>& taps, std::mt19937_64& rng) {
  const std::size_t half = taps.size() / 2;
  const std::size_t prow = rows + 2 * half;
  const std::size_t pcol = cols + 2 * half;
  std::normal_distribution<double> normal;
  std::vector<double> white(prow * pcol);
  for (auto& v : white) v = normal(rng);

  // along columns first: prow x cols
  std::vector<double> pass(prow * cols, 0.0);
  for (std::size_t r = 0; r < prow; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (std::size_t t = 0; t < taps.size(); ++t) acc += taps[t] * white[r * pcol + c + t];
      pass[r * cols + c] = acc;
    }
  }
  std::vector<double> field(rows * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (std::size_t t = 0; t < taps.size(); ++t) acc += taps[t] * pass[(r + t) * cols + c];
      field[r * cols + c] = acc;
    }
  }
  return field;
}

double base_spectrum(std::size_t band, std::size_t bands) {
  const double x = static_cast<double>(band) / static_cast<double>(bands);
  return 250.0 + 15.0 * std::sin(3.0 * std::numbers::pi * x) + 5.0 * std::cos(11.0 * x);
}

/// Rough mid-latitude temperature profile in kelvin.
double base_temperature(double pressure_hpa) {
  const double height_km = 7.0 * std::log(1000.0 / pressure_hpa);
  if (height_km < 11.0) return 288.0 - 6.5 * height_km;
  if (height_km < 20.0) return 216.5;
  return 216.5 + 1.0 * (height_km - 20.0);
}

}  // namespace

std::vector<double> structured_noise_profile(std::size_t bands) {
  std::vector<double> stds(bands);
  for (std::size_t b = 0; b < bands; ++b) {
    const double x = bands > 1 ? static_cast<double>(b) / static_cast<double>(bands - 1) : 0.0;
    stds[b] = 0.2 + 6.0 * std::pow(x, 6.0);
  }
  return stds;
}

std::vector<double> default_pressure_axis(std::size_t levels) {
  std::vector<double> axis(levels);
  for (std::size_t l = 0; l < levels; ++l) {
    const double t = levels > 1 ? static_cast<double>(l) / static_cast<double>(levels - 1) : 0.0;
    axis[l] = 1000.0 * std::pow(10.0, -2.0 * t);
  }
  return axis;
}

void SceneConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw UsageError("scene config field '" + field + "': " + why);
  };
  if (rows == 0) fail("rows", "must be positive");
  if (cols == 0) fail("cols", "must be positive");
  if (bands == 0) fail("bands", "must be positive");
  if (levels == 0) fail("levels", "must be positive");
  if (latent_count == 0) fail("latent_count", "must be positive");
  if (latent_count > bands || latent_count > rows * cols) {
    fail("latent_count", "must not exceed bands or rows*cols");
  }
  if (!(length_scale >= 0.0) || !std::isfinite(length_scale)) {
    fail("length_scale", "must be finite and non-negative");
  }
  if (!(latent_decay > 0.0) || !std::isfinite(latent_decay)) {
    fail("latent_decay", "must be finite and positive");
  }
  if (!(mixing_scale > 0.0) || !std::isfinite(mixing_scale)) {
    fail("mixing_scale", "must be finite and positive");
  }
  if (!(nonlinearity >= 0.0) || !std::isfinite(nonlinearity)) {
    fail("nonlinearity", "must be finite and non-negative");
  }
  if (!noise_std.empty()) {
    if (noise_std.size() != bands) {
      fail("noise_std", "has " + std::to_string(noise_std.size()) + " entries for " +
                            std::to_string(bands) + " bands");
    }
    for (double s : noise_std) {
      if (!(s >= 0.0) || !std::isfinite(s)) fail("noise_std", "entries must be finite and >= 0");
    }
  }
  if (cloud) {
    if (cloud->row + cloud->rows > rows || cloud->col + cloud->cols > cols) {
      fail("cloud", "patch extends outside the grid");
    }
    if (!(cloud->noise_factor >= 0.0) || !std::isfinite(cloud->noise_factor)) {
      fail("cloud", "noise_factor must be finite and non-negative");
    }
  }
}

std::vector<double> SceneConfig::resolved_noise_std() const {
  return noise_std.empty() ? structured_noise_profile(bands) : noise_std;
}

SyntheticScene generate_scene(const SceneConfig& config) {
  config.validate();
  const std::size_t rows = config.rows;
  const std::size_t cols = config.cols;
  const std::size_t n = rows * cols;
  const std::size_t d = config.bands;
  const std::size_t o = config.levels;
  const std::size_t q = config.latent_count;

  // Latent fields, pixel-major.
  auto latent_rng = make_stream(config.seed, kLatentStream);
  const auto taps = smoothing_taps(config.length_scale);
  std::vector<double> latents(n * q);
  for (std::size_t j = 0; j < q; ++j) {
    const double amplitude = std::pow(config.latent_decay, static_cast<double>(j));
    const auto field = smooth_field(rows, cols, taps, latent_rng);
    for (std::size_t i = 0; i < n; ++i) latents[i * q + j] = amplitude * field[i];
  }

  // Forward model: spectral mixing then profile loadings.
  auto mixing_rng = make_stream(config.mixing_seed, kMixingStream);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd mixing(q, d);
  for (Eigen::Index j = 0; j < mixing.rows(); ++j) {
    for (Eigen::Index b = 0; b < mixing.cols(); ++b) mixing(j, b) = config.mixing_scale * normal(mixing_rng);
  }
  Eigen::MatrixXd loadings(q, o);
  for (Eigen::Index j = 0; j < loadings.rows(); ++j) {
    for (Eigen::Index l = 0; l < loadings.cols(); ++l) loadings(j, l) = 2.0 * normal(mixing_rng);
  }

  // Noise: per-band std, optional cloud inflation, optional along-track
  // correlation. Drawn on rows + 2 so the correlated variant needs no padding.
  auto noise_rng = make_stream(config.seed, kNoiseStream);
  const auto stds = config.resolved_noise_std();
  std::normal_distribution<double> noise_normal;
  std::vector<double> white((rows + 2) * cols * d);
  for (auto& v : white) v = noise_normal(noise_rng);
  auto white_at = [&](std::size_t prow, std::size_t c, std::size_t b) {
    return white[(prow * cols + c) * d + b];
  };
  std::vector<double> noise(n * d);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double factor = 1.0;
      if (config.cloud && r >= config.cloud->row && r < config.cloud->row + config.cloud->rows &&
          c >= config.cloud->col && c < config.cloud->col + config.cloud->cols) {
        factor = config.cloud->noise_factor;
      }
      for (std::size_t b = 0; b < d; ++b) {
        double e = white_at(r + 1, c, b);
        if (config.spatially_correlated_noise) {
          e = (white_at(r, c, b) + e + white_at(r + 2, c, b)) / std::sqrt(3.0);
        }
        noise[(r * cols + c) * d + b] = factor * stds[b] * e;
      }
    }
  }

  const auto latent_map = Eigen::Map<const RowMatrix>(latents.data(), static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(q));
  const RowMatrix signal = latent_map * mixing;
  const RowMatrix profile_anomaly = latent_map * loadings;

  std::vector<double> base(d);
  for (std::size_t b = 0; b < d; ++b) base[b] = base_spectrum(b, d);
  std::vector<double> spectra(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < d; ++b) {
      const double s = signal(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
      spectra[i * d + b] = base[b] + s + config.nonlinearity * std::tanh(s) + noise[i * d + b];
    }
  }

  auto pressure = default_pressure_axis(o);
  std::vector<double> profiles(n * o);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < o; ++l) {
      profiles[i * o + l] = base_temperature(pressure[l]) +
                            profile_anomaly(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
    }
  }

  return {SpectralCube(rows, cols, d, std::move(spectra)),
          ProfileCube(rows, cols, o, std::move(profiles), std::move(pressure)),
          Cube(rows, cols, q, std::move(latents)), Cube(rows, cols, d, std::move(noise))};
}

SceneConfig orbit_config(const SceneConfig& base, std::size_t index) {
  // splitmix64 finalizer
  std::uint64_t z = base.seed + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  SceneConfig out = base;
  out.seed = z ^ (z >> 31);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

template <typename T>
void read_field(const nlohmann::json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError(std::string("scene config field '") + key + "' has the wrong type");
  }
}

}  // namespace

SceneConfig scene_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw UsageError("scene config must be a JSON object");
  static const std::set<std::string> known{
      "rows",        "cols",          "bands",        "levels",
      "latent_count", "length_scale", "latent_decay", "mixing_scale",
      "mixing_seed", "noise_std",     "spatially_correlated_noise",
      "nonlinearity", "seed",         "cloud"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw UsageError("scene config field '" + key + "' is not recognized");
  }
  // Negative counts would wrap on conversion to size_t.
  for (const char* key : {"rows", "cols", "bands", "levels", "latent_count", "mixing_seed", "seed"}) {
    if (doc.contains(key) && !doc.at(key).is_number_unsigned()) {
      throw UsageError(std::string("scene config field '") + key +
                       "' must be a non-negative integer");
    }
  }
  SceneConfig c;
  read_field(doc, "rows", c.rows);
  read_field(doc, "cols", c.cols);
  read_field(doc, "bands", c.bands);
  read_field(doc, "levels", c.levels);
  read_field(doc, "latent_count", c.latent_count);
  read_field(doc, "length_scale", c.length_scale);
  read_field(doc, "latent_decay", c.latent_decay);
  read_field(doc, "mixing_scale", c.mixing_scale);
  read_field(doc, "mixing_seed", c.mixing_seed);
  read_field(doc, "noise_std", c.noise_std);
  read_field(doc, "spatially_correlated_noise", c.spatially_correlated_noise);
  read_field(doc, "nonlinearity", c.nonlinearity);
  read_field(doc, "seed", c.seed);
  if (doc.contains("cloud") && !doc.at("cloud").is_null()) {
    const auto& cj = doc.at("cloud");
    if (!cj.is_object()) throw UsageError("scene config field 'cloud' must be an object");
    CloudPatch patch;
    try {
      patch.row = cj.at("row").get<std::size_t>();
      patch.col = cj.at("col").get<std::size_t>();
      patch.rows = cj.at("rows").get<std::size_t>();
      patch.cols = cj.at("cols").get<std::size_t>();
      patch.noise_factor = cj.at("noise_factor").get<double>();
    } catch (const nlohmann::json::exception&) {
      throw UsageError(
          "scene config field 'cloud' needs integer row, col, rows, cols and a numeric "
          "noise_factor");
    }
    c.cloud = patch;
  }
  c.validate();
  return c;
}

nlohmann::ordered_json scene_config_to_json(const SceneConfig& c) {
  nlohmann::ordered_json doc;
  doc["rows"] = c.rows;
  doc["cols"] = c.cols;
  doc["bands"] = c.bands;
  doc["levels"] = c.levels;
  doc["latent_count"] = c.latent_count;
  doc["length_scale"] = c.length_scale;
  doc["latent_decay"] = c.latent_decay;
  doc["mixing_scale"] = c.mixing_scale;
  doc["mixing_seed"] = c.mixing_seed;
  doc["noise_std"] = c.resolved_noise_std();
  doc["spatially_correlated_noise"] = c.spatially_correlated_noise;
  doc["nonlinearity"] = c.nonlinearity;
  doc["seed"] = c.seed;
  if (c.cloud) {
    doc["cloud"] = {{"row", c.cloud->row},
                    {"col", c.cloud->col},
                    {"rows", c.cloud->rows},
                    {"cols", c.cloud->cols},
                    {"noise_factor", c.cloud->noise_factor}};
  }
  return doc;
}

}  // namespace mnfret
