#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mnfret/cube.hpp"
#include "mnfret/features.hpp"

namespace mnfret {

struct TrainingInfo {
  std::string method;
  std::size_t components = 0;
  std::size_t window = 1;
  std::uint64_t seed = 0;
  std::string data_hash;
};

/// predictions = X * weights + 1 * intercept^T
struct RetrievalModel {
  Eigen::VectorXd intercept;
  /// features x levels
  Eigen::MatrixXd weights;
  double ridge = 0.0;
  TrainingInfo info;
  /// Pressure levels of the targets, when known.
  std::vector<double> pressure_axis;

  std::size_t features() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t levels() const { return static_cast<std::size_t>(weights.cols()); }
};

/// Minimizes ||X B + 1 a^T - Y||_F^2 + ridge ||B||_F^2 with the intercept
/// unpenalized. With ridge == 0 a rank-deficient X is an error.
RetrievalModel fit_linear(const Eigen::Ref<const RowMatrix>& inputs,
                          const Eigen::Ref<const RowMatrix>& targets, double ridge = 0.0);
RetrievalModel fit_linear(const DesignMatrix& design, const Eigen::Ref<const RowMatrix>& targets,
                          double ridge = 0.0);

RowMatrix predict(const RetrievalModel& model, const Eigen::Ref<const RowMatrix>& inputs);
RowMatrix predict(const RetrievalModel& model, const DesignMatrix& design);

/// Profiles of several cubes stacked as samples x levels, in scan order.
RowMatrix target_matrix(std::span<const ProfileCube> profiles);

/// Writes predictions back onto a grid as a profile cube.
ProfileCube to_profile_cube(const Eigen::Ref<const RowMatrix>& predictions, std::size_t rows,
                            std::size_t cols, std::vector<double> pressure_axis);

}  // namespace mnfret
