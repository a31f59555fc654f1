#include "mnfret/decomposition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "mnfret/error.hpp"

namespace mnfret {

std::string to_string(Method method) { return method == Method::pca ? "pca" : "mnf"; }

Method parse_method(const std::string& text) {
  if (text == "pca") return Method::pca;
  if (text == "mnf") return Method::mnf;
  throw UsageError("unknown method '" + text + "' (expected pca or mnf)");
}

namespace {

void check_symmetric(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw UsageError(std::string(what) + " must be a non-empty square matrix");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw UsageError(std::string(what) + " is not symmetric");
  }
}

void check_rank(std::size_t k, std::size_t d) {
  if (k < 1 || k > d) {
    throw UsageError("component count k=" + std::to_string(k) + " outside [1, " +
                     std::to_string(d) + "]");
  }
}

/// Eigenpairs of a symmetric matrix, descending.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> descending_eigen(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

}  // namespace

void apply_sign_convention(Eigen::MatrixXd& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < columns.rows(); ++i) {
      if (std::abs(columns(i, j)) > std::abs(columns(best, j))) best = i;
    }
    if (columns(best, j) < 0.0) columns.col(j) *= -1.0;
  }
}

LinearBasis LinearBasis::leading(std::size_t k) const {
  check_rank(k, size());
  LinearBasis out = *this;
  const auto kk = static_cast<Eigen::Index>(k);
  out.components = components.leftCols(kk);
  out.eigenvalues = eigenvalues.head(kk);
  return out;
}

std::string LinearBasis::id() const {
  // FNV-1a over the component bits.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (Eigen::Index i = 0; i < mean.size(); ++i) mix(mean(i));
  for (Eigen::Index i = 0; i < components.size(); ++i) mix(components.data()[i]);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return to_string(method) + "-d" + std::to_string(dimension()) + "-k" + std::to_string(size()) +
         "-" + buf;
}

LinearBasis fit_pca(const CovarianceEstimate& signal_cov, std::size_t k) {
  check_symmetric(signal_cov.matrix, "signal covariance");
  check_rank(k, signal_cov.dimension());
  const auto [values, vectors] = descending_eigen(signal_cov.matrix);
  const auto kk = static_cast<Eigen::Index>(k);

  LinearBasis basis;
  basis.method = Method::pca;
  basis.mean = signal_cov.centered
                   ? signal_cov.mean
                   : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(signal_cov.dimension()));
  basis.components = vectors.leftCols(kk);
  apply_sign_convention(basis.components);
  basis.eigenvalues = values.head(kk);
  basis.eigenvalue_total = values.sum();
  return basis;
}

LinearBasis fit_mnf(const CovarianceEstimate& signal_cov, const CovarianceEstimate& noise_cov,
                    std::size_t k, double ridge) {
  check_symmetric(signal_cov.matrix, "signal covariance");
  check_symmetric(noise_cov.matrix, "noise covariance");
  const std::size_t d = signal_cov.dimension();
  if (noise_cov.dimension() != d) {
    throw UsageError("signal and noise covariances differ in dimension (" + std::to_string(d) +
                     " vs " + std::to_string(noise_cov.dimension()) + ")");
  }
  check_rank(k, d);
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw UsageError("ridge must be finite and >= 0");

  const auto dd = static_cast<Eigen::Index>(d);
  const double mean_noise = noise_cov.matrix.trace() / static_cast<double>(d);
  Eigen::MatrixXd regularized = noise_cov.matrix;
  regularized.diagonal().array() += ridge * mean_noise;

  Eigen::LLT<Eigen::MatrixXd> chol(regularized);
  if (chol.info() != Eigen::Success || !(chol.matrixL().toDenseMatrix().diagonal().array() > 0.0).all()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", ridge);
    throw NumericalError(std::string("noise covariance is not positive definite with ridge ") +
                         buf + "; retry with a larger ridge");
  }
  const auto lower = chol.matrixL();
  // whitened = L^-1 S L^-T, formed as two triangular solves.
  const Eigen::MatrixXd half = lower.solve(signal_cov.matrix);
  Eigen::MatrixXd whitened = lower.solve(half.transpose());
  whitened = 0.5 * (whitened + whitened.transpose());

  const auto [values, vectors] = descending_eigen(whitened);
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd components = chol.matrixU().solve(vectors.leftCols(kk));
  apply_sign_convention(components);

  LinearBasis basis;
  basis.method = Method::mnf;
  basis.mean = signal_cov.centered ? signal_cov.mean : Eigen::VectorXd::Zero(dd);
  basis.components = std::move(components);
  basis.eigenvalues = values.head(kk);
  basis.eigenvalue_total = values.sum();
  basis.noise_ridge = ridge;
  basis.noise_scaling = noise_cov.scaling;
  basis.noise_metric = std::move(regularized);
  return basis;
}

ScoreCube project(const SpectralCube& cube, const LinearBasis& basis) {
  if (cube.bands() != basis.dimension()) {
    throw UsageError("cube has " + std::to_string(cube.bands()) + " bands, basis expects " +
                     std::to_string(basis.dimension()));
  }
  const RowMatrix scores = (cube.as_matrix().rowwise() - basis.mean.transpose()) * basis.components;
  std::vector<double> values(scores.data(), scores.data() + scores.size());
  return {cube.rows(), cube.cols(), basis.size(), std::move(values), basis.id()};
}

EigenvalueCurve eigenvalue_curve(const LinearBasis& basis) {
  EigenvalueCurve curve;
  curve.partial = !basis.full_spectrum();
  const auto k = basis.size();
  curve.cumulative.resize(k);
  const double total = basis.eigenvalues.sum();
  if (!(total > 0.0)) {
    // Degenerate (all-zero) spectrum: every component counts the same.
    for (std::size_t i = 0; i < k; ++i) curve.cumulative[i] = static_cast<double>(i + 1) / static_cast<double>(k);
    return curve;
  }
  double running = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    running += basis.eigenvalues(static_cast<Eigen::Index>(i));
    curve.cumulative[i] = running / total;
  }
  curve.cumulative.back() = 1.0;
  return curve;
}

std::vector<double> signal_fraction(const LinearBasis& basis) {
  if (basis.method != Method::mnf) throw UsageError("signal fraction is defined for MNF bases only");
  std::vector<double> out(basis.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double lambda = basis.eigenvalues(static_cast<Eigen::Index>(i));
    out[i] = lambda > 0.0 ? std::clamp(1.0 - 1.0 / lambda, 0.0, 1.0) : 0.0;
  }
  return out;
}

}  // namespace mnfret
