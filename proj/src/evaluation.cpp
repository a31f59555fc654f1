#include "mnfret/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mnfret/error.hpp"

namespace mnfret {

std::vector<double> rmse_profile(const Eigen::Ref<const RowMatrix>& truth,
                                 const Eigen::Ref<const RowMatrix>& predicted) {
  if (truth.rows() != predicted.rows() || truth.cols() != predicted.cols()) {
    throw UsageError("rmse: truth is " + std::to_string(truth.rows()) + "x" +
                     std::to_string(truth.cols()) + ", prediction " +
                     std::to_string(predicted.rows()) + "x" + std::to_string(predicted.cols()));
  }
  if (truth.rows() < 1 || truth.cols() < 1) throw UsageError("rmse: no samples");
  const Eigen::RowVectorXd mse =
      (truth - predicted).array().square().colwise().sum() / static_cast<double>(truth.rows());
  std::vector<double> out(static_cast<std::size_t>(mse.size()));
  for (Eigen::Index j = 0; j < mse.size(); ++j) out[static_cast<std::size_t>(j)] = std::sqrt(mse(j));
  return out;
}

double mean_rmse(std::span<const double> level_rmse) {
  if (level_rmse.empty()) throw UsageError("mean_rmse of an empty profile");
  return std::accumulate(level_rmse.begin(), level_rmse.end(), 0.0) /
         static_cast<double>(level_rmse.size());
}

double gaussian_total_correlation(const Eigen::Ref<const RowMatrix>& variables, double shrinkage) {
  const Eigen::Index n = variables.rows();
  const Eigen::Index m = variables.cols();
  if (m < 1) throw UsageError("total correlation needs at least one variable");
  if (n <= m) {
    throw UsageError("total correlation needs more samples (" + std::to_string(n) +
                     ") than variables (" + std::to_string(m) + ")");
  }
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) throw UsageError("shrinkage must lie in [0, 1]");

  Eigen::MatrixXd centered = variables.rowwise() - variables.colwise().mean();
  const Eigen::VectorXd norms = centered.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!(norms(j) > 0.0)) {
      throw NumericalError("total correlation: variable " + std::to_string(j) + " is constant");
    }
  }
  centered = centered * norms.cwiseInverse().asDiagonal();
  Eigen::MatrixXd corr = centered.transpose() * centered;
  corr = (1.0 - shrinkage) * corr + shrinkage * Eigen::MatrixXd::Identity(m, m);
  corr.diagonal().setOnes();

  Eigen::LLT<Eigen::MatrixXd> chol(corr);
  if (chol.info() != Eigen::Success) {
    throw NumericalError(
        "correlation matrix is singular; increase the shrinkage towards identity");
  }
  const Eigen::MatrixXd lower = chol.matrixL();
  double log_det = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!(lower(j, j) > 0.0)) {
      throw NumericalError(
          "correlation matrix is singular; increase the shrinkage towards identity");
    }
    log_det += 2.0 * std::log(lower(j, j));
  }
  return std::max(0.0, -0.5 * log_det);
}

InformationEstimate gaussian_information(const Eigen::Ref<const RowMatrix>& scores,
                                         const Eigen::Ref<const RowMatrix>& targets,
                                         double shrinkage) {
  if (scores.rows() != targets.rows()) throw UsageError("scores and targets differ in sample count");
  RowMatrix joint(scores.rows(), scores.cols() + targets.cols());
  joint << scores, targets;
  InformationEstimate est;
  est.joint = gaussian_total_correlation(joint, shrinkage);
  est.inputs = gaussian_total_correlation(scores, shrinkage);
  return est;
}

}  // namespace mnfret
