#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mnfret/cube.hpp"

namespace mnfret {

/// Level j -> sqrt(mean over samples of the squared error at level j).
std::vector<double> rmse_profile(const Eigen::Ref<const RowMatrix>& truth,
                                 const Eigen::Ref<const RowMatrix>& predicted);

double mean_rmse(std::span<const double> level_rmse);

inline constexpr double kDefaultInformationShrinkage = 1e-6;

/// Gaussian total correlation -0.5 log det(R) of the columns of `variables`,
/// R being their sample correlation matrix shrunk towards the identity:
/// (1 - shrinkage) R + shrinkage I. In nats, never negative.
double gaussian_total_correlation(const Eigen::Ref<const RowMatrix>& variables,
                                  double shrinkage = kDefaultInformationShrinkage);

/// Gaussian proxies for the information shared by projected inputs and targets.
struct InformationEstimate {
  /// T([scores, targets])
  double joint = 0.0;
  /// T(scores)
  double inputs = 0.0;
  /// T([scores, targets]) - T(scores)
  double conditional() const { return joint - inputs; }
};

InformationEstimate gaussian_information(const Eigen::Ref<const RowMatrix>& scores,
                                         const Eigen::Ref<const RowMatrix>& targets,
                                         double shrinkage = kDefaultInformationShrinkage);

}  // namespace mnfret
