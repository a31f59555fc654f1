#include "mnfret/cube.hpp"

#include <algorithm>
#include <cmath>

#include "binary_io.hpp"
#include "mnfret/error.hpp"

namespace mnfret {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(CubeRole role) {
  switch (role) {
    case CubeRole::spectral: return "spectral";
    case CubeRole::profile: return "profile";
    case CubeRole::noise: return "noise";
    case CubeRole::scores: return "scores";
  }
  return "spectral";
}

CubeRole parse_cube_role(const std::string& text) {
  if (text == "spectral") return CubeRole::spectral;
  if (text == "profile") return CubeRole::profile;
  if (text == "noise") return CubeRole::noise;
  if (text == "scores") return CubeRole::scores;
  throw UsageError("unknown cube role '" + text + "'");
}

std::string to_string(NoiseScaling scaling) {
  return scaling == NoiseScaling::raw ? "raw" : "unit";
}

NoiseScaling parse_noise_scaling(const std::string& text) {
  if (text == "raw") return NoiseScaling::raw;
  if (text == "unit" || text == "unit-white-noise-gain") return NoiseScaling::unit_white_noise_gain;
  throw UsageError("unknown noise scaling '" + text + "' (expected raw or unit)");
}

Cube::Cube(std::size_t rows, std::size_t cols, std::size_t depth, std::vector<double> values)
    : rows_(rows), cols_(cols), depth_(depth), values_(std::move(values)) {
  if (rows == 0 || cols == 0 || depth == 0) {
    throw UsageError("cube dimensions must be positive, got " + std::to_string(rows) + "x" +
                     std::to_string(cols) + "x" + std::to_string(depth));
  }
  if (values_.size() != rows * cols * depth) {
    throw UsageError("cube holds " + std::to_string(values_.size()) + " values, expected " +
                     std::to_string(rows * cols * depth));
  }
  try {
    detail::require_finite(values_, "cube");
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }
}

SpectralCube::SpectralCube(std::size_t rows, std::size_t cols, std::size_t bands,
                           std::vector<double> values, std::vector<std::size_t> band_ids)
    : Cube(rows, cols, bands, std::move(values)), band_ids_(std::move(band_ids)) {
  if (band_ids_.empty()) return;
  if (band_ids_.size() != bands) {
    throw UsageError("band_ids has " + std::to_string(band_ids_.size()) + " entries for " +
                     std::to_string(bands) + " bands");
  }
  if (std::adjacent_find(band_ids_.begin(), band_ids_.end(), std::greater_equal<>()) !=
      band_ids_.end()) {
    throw UsageError("band_ids must be strictly increasing");
  }
}

ProfileCube::ProfileCube(std::size_t rows, std::size_t cols, std::size_t levels,
                         std::vector<double> values, std::vector<double> pressure_axis)
    : Cube(rows, cols, levels, std::move(values)), pressure_axis_(std::move(pressure_axis)) {
  if (pressure_axis_.size() != levels) {
    throw UsageError("pressure axis has " + std::to_string(pressure_axis_.size()) +
                     " entries for " + std::to_string(levels) + " levels");
  }
  const bool increasing = std::adjacent_find(pressure_axis_.begin(), pressure_axis_.end(),
                                             std::greater_equal<>()) == pressure_axis_.end();
  const bool decreasing = std::adjacent_find(pressure_axis_.begin(), pressure_axis_.end(),
                                             std::less_equal<>()) == pressure_axis_.end();
  if (!increasing && !decreasing) throw UsageError("pressure axis must be strictly monotone");
}

NoiseCube::NoiseCube(std::size_t rows, std::size_t cols, std::size_t bands,
                     std::vector<double> values, NoiseScaling scaling)
    : Cube(rows, cols, bands, std::move(values)),
      interior_mask_(rows * cols, 0),
      scaling_(scaling) {
  for (std::size_t r = 1; r + 1 < rows; ++r) {
    for (std::size_t c = 1; c + 1 < cols; ++c) interior_mask_[r * cols + c] = 1;
  }
}

std::size_t NoiseCube::interior_count() const {
  return static_cast<std::size_t>(std::count(interior_mask_.begin(), interior_mask_.end(), 1));
}

ScoreCube::ScoreCube(std::size_t rows, std::size_t cols, std::size_t components,
                     std::vector<double> values, std::string basis_id)
    : Cube(rows, cols, components, std::move(values)), basis_id_(std::move(basis_id)) {}

ScoreCube ScoreCube::leading(std::size_t k) const {
  if (k == 0 || k > components()) {
    throw UsageError("cannot take " + std::to_string(k) + " leading components of " +
                     std::to_string(components()));
  }
  if (k == components()) return *this;
  std::vector<double> out;
  out.reserve(pixels() * k);
  for (std::size_t i = 0; i < pixels(); ++i) {
    const auto p = pixel(i);
    out.insert(out.end(), p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return {rows(), cols(), k, std::move(out), basis_id_};
}

// ---------------------------------------------------------------------------
// Files

fs::path cube_base_path(const fs::path& path) {
  const auto ext = path.extension();
  if (ext == ".json" || ext == ".bin") return fs::path(path).replace_extension();
  return path;
}

namespace {

fs::path with_suffix(const fs::path& base, const char* suffix) {
  return fs::path(base.string() + suffix);
}

template <typename T>
T header_field(const json& doc, const char* key, const fs::path& where) {
  if (!doc.contains(key)) {
    throw IoError("malformed header " + where.string() + ": missing field '" + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw IoError("malformed header " + where.string() + ": field '" + key +
                  "' has the wrong type");
  }
}

void expect_tag(const json& doc, const char* key, const char* value, const fs::path& where) {
  const auto tag = header_field<std::string>(doc, key, where);
  if (tag != value) {
    throw IoError("unsupported header " + where.string() + ": " + key + "='" + tag +
                  "', expected '" + value + "'");
  }
}

void write_cube(const fs::path& path, const CubeHeader& header, std::span<const double> values) {
  detail::require_finite(values, "refusing to save cube");
  const auto base = cube_base_path(path);
  if (base.has_parent_path()) fs::create_directories(base.parent_path());

  ordered_json doc;
  doc["rows"] = header.rows;
  doc["cols"] = header.cols;
  doc["depth"] = header.depth;
  doc["dtype"] = "f64";
  doc["order"] = "little";
  doc["layout"] = "bip";
  doc["role"] = to_string(header.role);
  if (header.band_ids) doc["band_ids"] = *header.band_ids;
  if (header.pressure_axis) doc["pressure_axis"] = *header.pressure_axis;
  if (header.noise_scaling) doc["noise_scaling"] = *header.noise_scaling;
  if (header.basis) doc["basis"] = *header.basis;

  detail::write_f64_payload(with_suffix(base, ".bin"), values);
  detail::write_json(with_suffix(base, ".json"), doc);
}

CubeHeader header_for(const Cube& cube, CubeRole role) {
  CubeHeader h;
  h.rows = cube.rows();
  h.cols = cube.cols();
  h.depth = cube.depth();
  h.role = role;
  return h;
}

}  // namespace

CubeHeader read_cube_header(const fs::path& path) {
  const auto where = with_suffix(cube_base_path(path), ".json");
  const json doc = detail::read_json(where);
  if (!doc.is_object()) throw IoError("malformed header " + where.string() + ": not an object");

  CubeHeader h;
  const auto rows = header_field<long long>(doc, "rows", where);
  const auto cols = header_field<long long>(doc, "cols", where);
  const auto depth = header_field<long long>(doc, "depth", where);
  if (rows <= 0 || cols <= 0 || depth <= 0) {
    throw IoError("malformed header " + where.string() + ": dims must be positive");
  }
  h.rows = static_cast<std::size_t>(rows);
  h.cols = static_cast<std::size_t>(cols);
  h.depth = static_cast<std::size_t>(depth);
  expect_tag(doc, "dtype", "f64", where);
  expect_tag(doc, "order", "little", where);
  expect_tag(doc, "layout", "bip", where);
  try {
    h.role = parse_cube_role(header_field<std::string>(doc, "role", where));
  } catch (const UsageError& e) {
    throw IoError("malformed header " + where.string() + ": " + e.what());
  }
  if (doc.contains("band_ids")) {
    h.band_ids = header_field<std::vector<std::size_t>>(doc, "band_ids", where);
  }
  if (doc.contains("pressure_axis")) {
    h.pressure_axis = header_field<std::vector<double>>(doc, "pressure_axis", where);
  }
  if (doc.contains("noise_scaling")) {
    h.noise_scaling = header_field<std::string>(doc, "noise_scaling", where);
  }
  if (doc.contains("basis")) h.basis = header_field<std::string>(doc, "basis", where);
  return h;
}

AnyCube load_cube(const fs::path& path) {
  const auto base = cube_base_path(path);
  const CubeHeader h = read_cube_header(base);
  auto values = detail::read_f64_payload(with_suffix(base, ".bin"), h.rows * h.cols * h.depth);
  detail::require_finite(values, "cube " + base.string());

  try {
    switch (h.role) {
      case CubeRole::spectral:
        return SpectralCube(h.rows, h.cols, h.depth, std::move(values),
                            h.band_ids.value_or(std::vector<std::size_t>{}));
      case CubeRole::profile:
        if (!h.pressure_axis) {
          throw IoError("profile cube " + base.string() + " lacks a pressure_axis");
        }
        return ProfileCube(h.rows, h.cols, h.depth, std::move(values), *h.pressure_axis);
      case CubeRole::noise:
        return NoiseCube(h.rows, h.cols, h.depth, std::move(values),
                         parse_noise_scaling(h.noise_scaling.value_or("raw")));
      case CubeRole::scores:
        return ScoreCube(h.rows, h.cols, h.depth, std::move(values), h.basis.value_or(""));
    }
  } catch (const UsageError& e) {
    throw IoError("invalid cube " + base.string() + ": " + e.what());
  }
  throw IoError("unreachable cube role");
}

SpectralCube load_spectral_cube(const fs::path& path) {
  auto any = load_cube(path);
  if (auto* cube = std::get_if<SpectralCube>(&any)) return std::move(*cube);
  throw UsageError(path.string() + " is not a spectral cube");
}

ProfileCube load_profile_cube(const fs::path& path) {
  auto any = load_cube(path);
  if (auto* cube = std::get_if<ProfileCube>(&any)) return std::move(*cube);
  throw UsageError(path.string() + " is not a profile cube");
}

void save_cube(const SpectralCube& cube, const fs::path& path) {
  auto h = header_for(cube, CubeRole::spectral);
  if (!cube.band_ids().empty()) h.band_ids = cube.band_ids();
  write_cube(path, h, cube.values());
}

void save_cube(const ProfileCube& cube, const fs::path& path) {
  auto h = header_for(cube, CubeRole::profile);
  h.pressure_axis = cube.pressure_axis();
  write_cube(path, h, cube.values());
}

void save_cube(const NoiseCube& cube, const fs::path& path) {
  auto h = header_for(cube, CubeRole::noise);
  h.noise_scaling = to_string(cube.scaling());
  write_cube(path, h, cube.values());
}

void save_cube(const ScoreCube& cube, const fs::path& path) {
  auto h = header_for(cube, CubeRole::scores);
  if (!cube.basis_id().empty()) h.basis = cube.basis_id();
  write_cube(path, h, cube.values());
}

// ---------------------------------------------------------------------------
// Masking and reshaping

SpectralCube apply_band_mask(const SpectralCube& cube, const std::vector<bool>& keep) {
  if (keep.size() != cube.bands()) {
    throw UsageError("band mask has " + std::to_string(keep.size()) + " entries for " +
                     std::to_string(cube.bands()) + " bands");
  }
  std::vector<std::size_t> kept;
  for (std::size_t b = 0; b < keep.size(); ++b) {
    if (keep[b]) kept.push_back(b);
  }
  if (kept.empty()) throw UsageError("band mask keeps no bands");

  std::vector<double> out;
  out.reserve(cube.pixels() * kept.size());
  for (std::size_t i = 0; i < cube.pixels(); ++i) {
    const auto p = cube.pixel(i);
    for (auto b : kept) out.push_back(p[b]);
  }
  std::vector<std::size_t> ids(kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) {
    ids[j] = cube.band_ids().empty() ? kept[j] : cube.band_ids()[kept[j]];
  }
  return {cube.rows(), cube.cols(), kept.size(), std::move(out), std::move(ids)};
}

SampleMatrix cube_to_matrix(const SpectralCube& cube) {
  return {cube.as_matrix(), cube.rows(), cube.cols(), cube.band_ids()};
}

SpectralCube matrix_to_cube(const SampleMatrix& matrix) {
  const auto n = static_cast<std::size_t>(matrix.samples.rows());
  if (n != matrix.rows * matrix.cols) {
    throw UsageError("sample matrix has " + std::to_string(n) + " rows for a " +
                     std::to_string(matrix.rows) + "x" + std::to_string(matrix.cols) + " grid");
  }
  const auto d = static_cast<std::size_t>(matrix.samples.cols());
  std::vector<double> values(matrix.samples.data(), matrix.samples.data() + n * d);
  return {matrix.rows, matrix.cols, d, std::move(values), matrix.band_ids};
}

}  // namespace mnfret
