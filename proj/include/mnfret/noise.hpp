#pragma once

#include <array>
#include <span>

#include <Eigen/Dense>

#include "mnfret/cube.hpp"

namespace mnfret {

/// Residual of a least-squares quadratic (1, x, y, x^2, y^2, xy) fit over a
/// 3x3 window, evaluated at the centre; row-major taps.
inline constexpr std::array<double, 9> kParaboloidResidualKernel{
    1.0 / 9, -2.0 / 9, 1.0 / 9, -2.0 / 9, 4.0 / 9, -2.0 / 9, 1.0 / 9, -2.0 / 9, 1.0 / 9};

/// Factor that maps the residual std of white noise back to the noise std
/// (the raw kernel has energy 4/9).
inline constexpr double kUnitWhiteNoiseGain = 1.5;

/// Second-moment matrix with bookkeeping about how it was formed.
struct CovarianceEstimate {
  Eigen::MatrixXd matrix;
  /// Mean removed before accumulation; empty when `centered` is false.
  Eigen::VectorXd mean;
  std::size_t samples = 0;
  bool centered = false;
  NoiseScaling scaling = NoiseScaling::raw;
  /// Fewer samples than dimensions; the matrix is singular and MNF needs a ridge.
  bool underdetermined = false;

  std::size_t dimension() const { return static_cast<std::size_t>(matrix.rows()); }
};

/// Border pixels are filled using mirror padding (reflection without
/// repeating the edge) and flagged as non-interior.
NoiseCube paraboloid_residual_filter(const SpectralCube& cube,
                                     NoiseScaling scaling = NoiseScaling::raw);

/// (1/m) sum of residual outer products over interior pixels, uncentered.
CovarianceEstimate noise_covariance(const NoiseCube& noise);
CovarianceEstimate noise_covariance(std::span<const NoiseCube> noise);

/// Mean-centered second moment over every pixel, population divisor.
CovarianceEstimate signal_covariance(const SpectralCube& cube);
CovarianceEstimate signal_covariance(std::span<const SpectralCube> cubes);

}  // namespace mnfret
