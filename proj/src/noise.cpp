#include "mnfret/noise.hpp"

#include <string>

#include "mnfret/error.hpp"

namespace mnfret {

namespace {

std::size_t mirror(std::ptrdiff_t index, std::size_t size) {
  const auto n = static_cast<std::ptrdiff_t>(size);
  if (index < 0) return static_cast<std::size_t>(-index);
  if (index >= n) return static_cast<std::size_t>(2 * (n - 1) - index);
  return static_cast<std::size_t>(index);
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

NoiseCube paraboloid_residual_filter(const SpectralCube& cube, NoiseScaling scaling) {
  if (cube.rows() < 3 || cube.cols() < 3) {
    throw UsageError("paraboloid filter needs at least a 3x3 grid, got " +
                     std::to_string(cube.rows()) + "x" + std::to_string(cube.cols()));
  }
  const std::size_t rows = cube.rows();
  const std::size_t cols = cube.cols();
  const std::size_t d = cube.bands();
  const double gain = scaling == NoiseScaling::raw ? 1.0 : kUnitWhiteNoiseGain;

  std::vector<double> out(rows * cols * d, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double* dst = out.data() + (r * cols + c) * d;
      for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
        const std::size_t rr = mirror(static_cast<std::ptrdiff_t>(r) + dr, rows);
        for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
          const std::size_t cc = mirror(static_cast<std::ptrdiff_t>(c) + dc, cols);
          const double w = gain * kParaboloidResidualKernel[static_cast<std::size_t>((dr + 1) * 3 + dc + 1)];
          const auto src = cube.pixel(rr, cc);
          for (std::size_t b = 0; b < d; ++b) dst[b] += w * src[b];
        }
      }
    }
  }
  return {rows, cols, d, std::move(out), scaling};
}

CovarianceEstimate noise_covariance(const NoiseCube& noise) {
  return noise_covariance(std::span<const NoiseCube>(&noise, 1));
}

CovarianceEstimate noise_covariance(std::span<const NoiseCube> noise) {
  if (noise.empty()) throw UsageError("noise covariance needs at least one noise cube");
  const auto d = static_cast<Eigen::Index>(noise.front().depth());
  const NoiseScaling scaling = noise.front().scaling();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  std::size_t m = 0;
  // One partial sum per interior grid row, reduced in row order.
  for (const auto& cube : noise) {
    if (static_cast<Eigen::Index>(cube.depth()) != d) {
      throw UsageError("noise cubes disagree on band count");
    }
    if (cube.scaling() != scaling) throw UsageError("noise cubes disagree on scaling");
    if (cube.rows() < 3 || cube.cols() < 3) continue;
    const auto all = cube.as_matrix();
    const auto width = static_cast<Eigen::Index>(cube.cols() - 2);
    for (std::size_t r = 1; r + 1 < cube.rows(); ++r) {
      const auto first = static_cast<Eigen::Index>(r * cube.cols() + 1);
      const auto block = all.middleRows(first, width);
      gram.noalias() += block.transpose() * block;
      m += static_cast<std::size_t>(width);
    }
  }
  CovarianceEstimate est;
  est.samples = m;
  est.centered = false;
  est.scaling = scaling;
  est.underdetermined = m < static_cast<std::size_t>(d);
  est.matrix = m > 0 ? symmetrized(gram / static_cast<double>(m)) : gram;
  return est;
}

CovarianceEstimate signal_covariance(const SpectralCube& cube) {
  return signal_covariance(std::span<const SpectralCube>(&cube, 1));
}

CovarianceEstimate signal_covariance(std::span<const SpectralCube> cubes) {
  if (cubes.empty()) throw UsageError("signal covariance needs at least one cube");
  const auto d = static_cast<Eigen::Index>(cubes.front().bands());
  std::size_t n = 0;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  for (const auto& cube : cubes) {
    if (static_cast<Eigen::Index>(cube.bands()) != d) {
      throw UsageError("cubes disagree on band count");
    }
    sum += cube.as_matrix().colwise().sum().transpose();
    n += cube.pixels();
  }
  if (n < 2) throw UsageError("signal covariance needs at least 2 pixels");
  const Eigen::VectorXd mean = sum / static_cast<double>(n);

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  for (const auto& cube : cubes) {
    const Eigen::MatrixXd centered = cube.as_matrix().rowwise() - mean.transpose();
    gram.noalias() += centered.transpose() * centered;
  }
  CovarianceEstimate est;
  est.matrix = symmetrized(gram / static_cast<double>(n));
  est.mean = mean;
  est.samples = n;
  est.centered = true;
  est.underdetermined = n < static_cast<std::size_t>(d);
  return est;
}

}  // namespace mnfret
