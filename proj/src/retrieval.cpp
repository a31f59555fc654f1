#include "mnfret/retrieval.hpp"

#include <cmath>

#include "mnfret/error.hpp"

namespace mnfret {

namespace {

// Pivot ratio below which the equilibrated Gram matrix is treated as singular.
constexpr double kRankTolerance = 1e-13;

}  // namespace

RetrievalModel fit_linear(const Eigen::Ref<const RowMatrix>& inputs,
                          const Eigen::Ref<const RowMatrix>& targets, double ridge) {
  const Eigen::Index n = inputs.rows();
  const Eigen::Index p = inputs.cols();
  if (targets.rows() != n) {
    throw UsageError("inputs have " + std::to_string(n) + " samples, targets " +
                     std::to_string(targets.rows()));
  }
  if (n < 1 || p < 1 || targets.cols() < 1) throw UsageError("empty regression problem");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw UsageError("ridge must be finite and >= 0");

  const Eigen::RowVectorXd x_mean = inputs.colwise().mean();
  const Eigen::RowVectorXd y_mean = targets.colwise().mean();
  RowMatrix z = inputs.rowwise() - x_mean;
  const Eigen::MatrixXd y_centered = targets.rowwise() - y_mean;

  // Equilibrate columns to unit norm; constant columns keep scale 1.
  Eigen::VectorXd scale = z.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (scale(j) == 0.0) {
      if (ridge == 0.0) {
        throw NumericalError("design matrix is rank deficient (column " + std::to_string(j) +
                             " is constant); use a positive ridge");
      }
      scale(j) = 1.0;
    }
  }
  z = z * scale.cwiseInverse().asDiagonal();

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
  gram = gram.selfadjointView<Eigen::Lower>();
  // ridge * ||B||^2 with B = S^-1 B_z.
  gram.diagonal() += ridge * scale.array().square().inverse().matrix();

  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw NumericalError("normal equations could not be factored");
  if (ridge == 0.0) {
    const Eigen::VectorXd pivots = ldlt.vectorD();
    if (pivots.minCoeff() <= kRankTolerance * pivots.maxCoeff()) {
      throw NumericalError("design matrix is rank deficient; use a positive ridge");
    }
  }

  const Eigen::MatrixXd rhs = z.transpose() * y_centered;
  Eigen::MatrixXd solution = ldlt.solve(rhs);
  // One step of iterative refinement on the normal equations.
  const Eigen::MatrixXd correction_rhs = rhs - gram * solution;
  solution += ldlt.solve(correction_rhs);

  RetrievalModel model;
  model.weights = scale.cwiseInverse().asDiagonal() * solution;
  model.intercept = (y_mean - x_mean * model.weights).transpose();
  model.ridge = ridge;
  if (!model.weights.allFinite() || !model.intercept.allFinite()) {
    throw NumericalError("regression produced non-finite weights");
  }
  return model;
}

RetrievalModel fit_linear(const DesignMatrix& design, const Eigen::Ref<const RowMatrix>& targets,
                          double ridge) {
  auto model = fit_linear(design.values, targets, ridge);
  model.info.components = design.components;
  model.info.window = design.window;
  return model;
}

RowMatrix predict(const RetrievalModel& model, const Eigen::Ref<const RowMatrix>& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != model.features()) {
    throw UsageError("model expects " + std::to_string(model.features()) + " features, got " +
                     std::to_string(inputs.cols()));
  }
  RowMatrix out = inputs * model.weights;
  out.rowwise() += model.intercept.transpose();
  return out;
}

RowMatrix predict(const RetrievalModel& model, const DesignMatrix& design) {
  return predict(model, design.values);
}

RowMatrix target_matrix(std::span<const ProfileCube> profiles) {
  if (profiles.empty()) throw UsageError("no profile cubes given");
  const auto o = profiles.front().levels();
  Eigen::Index total = 0;
  for (const auto& p : profiles) {
    if (p.levels() != o) throw UsageError("profile cubes disagree on level count");
    total += static_cast<Eigen::Index>(p.pixels());
  }
  RowMatrix out(total, static_cast<Eigen::Index>(o));
  Eigen::Index row = 0;
  for (const auto& p : profiles) {
    const auto block = p.as_matrix();
    out.middleRows(row, block.rows()) = block;
    row += block.rows();
  }
  return out;
}

ProfileCube to_profile_cube(const Eigen::Ref<const RowMatrix>& predictions, std::size_t rows,
                            std::size_t cols, std::vector<double> pressure_axis) {
  if (static_cast<std::size_t>(predictions.rows()) != rows * cols) {
    throw UsageError("prediction count does not match the grid");
  }
  const auto o = static_cast<std::size_t>(predictions.cols());
  if (pressure_axis.empty()) {
    for (std::size_t l = 0; l < o; ++l) pressure_axis.push_back(static_cast<double>(l + 1));
  }
  std::vector<double> values(rows * cols * o);
  for (Eigen::Index i = 0; i < predictions.rows(); ++i) {
    for (Eigen::Index l = 0; l < predictions.cols(); ++l) {
      values[static_cast<std::size_t>(i) * o + static_cast<std::size_t>(l)] = predictions(i, l);
    }
  }
  return {rows, cols, o, std::move(values), std::move(pressure_axis)};
}

}  // namespace mnfret
