#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mnfret/cube.hpp"
#include "mnfret/noise.hpp"

namespace mnfret {

enum class Method { pca, mnf };

std::string to_string(Method method);
Method parse_method(const std::string& text);

/// Tag for the eigenvector sign rule: in every column the entry of largest
/// magnitude is positive, ties resolved towards the lowest index.
inline constexpr const char* kSignConvention = "largest-abs-positive";

/// Noise ridge used by fit_mnf when none is given, relative to the mean
/// noise variance.
inline constexpr double kDefaultMnfRidge = 1e-10;

/// Fitted projection x -> W^T (x - mean).
struct LinearBasis {
  Method method = Method::pca;
  Eigen::VectorXd mean;
  /// d x k, column j is the j-th direction.
  Eigen::MatrixXd components;
  /// Descending, length k.
  Eigen::VectorXd eigenvalues;
  /// Sum of all d eigenvalues of the underlying problem.
  double eigenvalue_total = 0.0;
  /// mnf only.
  double noise_ridge = 0.0;
  NoiseScaling noise_scaling = NoiseScaling::raw;
  /// Regularized noise covariance the MNF columns are orthonormal under.
  /// Empty for PCA and for bases read back from disk.
  Eigen::MatrixXd noise_metric;

  std::size_t dimension() const { return static_cast<std::size_t>(components.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(components.cols()); }
  bool full_spectrum() const { return size() == dimension(); }

  /// Keeps the first k directions.
  LinearBasis leading(std::size_t k) const;
  /// Short identifier derived from the method and the component bits.
  std::string id() const;
};

/// Flips column signs so the largest-magnitude entry of each column is positive.
void apply_sign_convention(Eigen::MatrixXd& columns);

LinearBasis fit_pca(const CovarianceEstimate& signal_cov, std::size_t k);

/// Solves signal_cov w = lambda (noise_cov + ridge * tr(noise_cov)/d * I) w by
/// Cholesky whitening of the regularized noise covariance, keeping the k
/// largest eigenpairs. Columns are orthonormal in the noise metric.
LinearBasis fit_mnf(const CovarianceEstimate& signal_cov, const CovarianceEstimate& noise_cov,
                    std::size_t k, double ridge = kDefaultMnfRidge);

/// Per pixel scores W^T (x - mean).
ScoreCube project(const SpectralCube& cube, const LinearBasis& basis);

struct EigenvalueCurve {
  /// cumsum(lambda) / total, last entry 1.
  std::vector<double> cumulative;
  /// True when the basis keeps fewer than d directions, in which case the
  /// normalization runs over the retained eigenvalues only.
  bool partial = false;
};

EigenvalueCurve eigenvalue_curve(const LinearBasis& basis);

/// MNF only: 1 - 1/lambda clamped to [0, 1], reading lambda as total/noise
/// variance per component.
std::vector<double> signal_fraction(const LinearBasis& basis);

}  // namespace mnfret
