#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace mnfret {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class CubeRole { spectral, profile, noise, scores };

std::string to_string(CubeRole role);
CubeRole parse_cube_role(const std::string& text);

/// Residual scaling applied by the paraboloid filter.
enum class NoiseScaling { raw, unit_white_noise_gain };

std::string to_string(NoiseScaling scaling);
NoiseScaling parse_noise_scaling(const std::string& text);

/// rows x cols grid of pixels, each holding `depth` contiguous doubles
/// (band-interleaved-by-pixel, pixels in row-major scan order).
///
/// The values are fixed at construction; every constructor checks the
/// length and rejects non-finite entries.
class Cube {
 public:
  Cube() = default;
  Cube(std::size_t rows, std::size_t cols, std::size_t depth, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t depth() const { return depth_; }
  std::size_t pixels() const { return rows_ * cols_; }

  std::span<const double> values() const { return values_; }
  std::span<const double> pixel(std::size_t index) const {
    return {values_.data() + index * depth_, depth_};
  }
  std::span<const double> pixel(std::size_t row, std::size_t col) const {
    return pixel(row * cols_ + col);
  }
  double at(std::size_t row, std::size_t col, std::size_t k) const {
    return values_[(row * cols_ + col) * depth_ + k];
  }

  /// Zero-copy pixels x depth view.
  Eigen::Map<const RowMatrix> as_matrix() const {
    return {values_.data(), static_cast<Eigen::Index>(pixels()),
            static_cast<Eigen::Index>(depth_)};
  }

  bool same_grid(const Cube& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Cube&, const Cube&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t depth_ = 0;
  std::vector<double> values_;
};

class SpectralCube : public Cube {
 public:
  SpectralCube() = default;
  /// `band_ids` empty means the cube is unmasked.
  SpectralCube(std::size_t rows, std::size_t cols, std::size_t bands, std::vector<double> values,
               std::vector<std::size_t> band_ids = {});

  std::size_t bands() const { return depth(); }
  const std::vector<std::size_t>& band_ids() const { return band_ids_; }

  friend bool operator==(const SpectralCube&, const SpectralCube&) = default;

 private:
  std::vector<std::size_t> band_ids_;
};

class ProfileCube : public Cube {
 public:
  ProfileCube() = default;
  ProfileCube(std::size_t rows, std::size_t cols, std::size_t levels, std::vector<double> values,
              std::vector<double> pressure_axis);

  std::size_t levels() const { return depth(); }
  /// hPa, strictly monotone.
  const std::vector<double>& pressure_axis() const { return pressure_axis_; }

  friend bool operator==(const ProfileCube&, const ProfileCube&) = default;

 private:
  std::vector<double> pressure_axis_;
};

/// Per-pixel, per-band residuals of the paraboloid filter.
class NoiseCube : public Cube {
 public:
  NoiseCube() = default;
  /// The interior mask is derived from the grid: a pixel is interior when its
  /// full 3x3 window lies inside the image.
  NoiseCube(std::size_t rows, std::size_t cols, std::size_t bands, std::vector<double> values,
            NoiseScaling scaling);

  bool interior(std::size_t row, std::size_t col) const {
    return interior_mask_[row * cols() + col] != 0;
  }
  const std::vector<unsigned char>& interior_mask() const { return interior_mask_; }
  std::size_t interior_count() const;
  NoiseScaling scaling() const { return scaling_; }

  friend bool operator==(const NoiseCube&, const NoiseCube&) = default;

 private:
  std::vector<unsigned char> interior_mask_;
  NoiseScaling scaling_ = NoiseScaling::raw;
};

/// Projected scores; `basis_id` names the basis that produced them.
class ScoreCube : public Cube {
 public:
  ScoreCube() = default;
  ScoreCube(std::size_t rows, std::size_t cols, std::size_t components, std::vector<double> values,
            std::string basis_id);

  std::size_t components() const { return depth(); }
  const std::string& basis_id() const { return basis_id_; }

  /// First `k` components of every pixel.
  ScoreCube leading(std::size_t k) const;

  friend bool operator==(const ScoreCube&, const ScoreCube&) = default;

 private:
  std::string basis_id_;
};

using AnyCube = std::variant<SpectralCube, ProfileCube, NoiseCube, ScoreCube>;

/// Contents of the `<name>.json` sidecar.
struct CubeHeader {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t depth = 0;
  CubeRole role = CubeRole::spectral;
  std::optional<std::vector<std::size_t>> band_ids;
  std::optional<std::vector<double>> pressure_axis;
  std::optional<std::string> noise_scaling;
  std::optional<std::string> basis;

  std::size_t payload_bytes() const { return rows * cols * depth * sizeof(double); }
};

/// `dir/name`, `dir/name.json` and `dir/name.bin` all name the same cube.
std::filesystem::path cube_base_path(const std::filesystem::path& path);

CubeHeader read_cube_header(const std::filesystem::path& path);

AnyCube load_cube(const std::filesystem::path& path);
SpectralCube load_spectral_cube(const std::filesystem::path& path);
ProfileCube load_profile_cube(const std::filesystem::path& path);

void save_cube(const SpectralCube& cube, const std::filesystem::path& path);
void save_cube(const ProfileCube& cube, const std::filesystem::path& path);
void save_cube(const NoiseCube& cube, const std::filesystem::path& path);
void save_cube(const ScoreCube& cube, const std::filesystem::path& path);

/// Keeps the bands whose flag is set, in original order, and records their
/// original indices (composed with any earlier mask).
SpectralCube apply_band_mask(const SpectralCube& cube, const std::vector<bool>& keep);

/// n x d sample matrix (row i = pixel i in scan order) plus what is needed to
/// put it back on the grid.
struct SampleMatrix {
  RowMatrix samples;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> band_ids;
};

SampleMatrix cube_to_matrix(const SpectralCube& cube);
SpectralCube matrix_to_cube(const SampleMatrix& matrix);

}  // namespace mnfret
