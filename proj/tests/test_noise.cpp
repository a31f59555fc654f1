#include <gtest/gtest.h>

#include <numeric>

#include "mnfret/error.hpp"
#include "mnfret/noise.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mnfret;
using testing_support::random_cube;

namespace {

std::vector<double> band_of(const Cube& cube, std::size_t b) {
  std::vector<double> out(cube.pixels());
  for (std::size_t i = 0; i < cube.pixels(); ++i) out[i] = cube.pixel(i)[b];
  return out;
}

double interior_mean_square(const NoiseCube& n, std::size_t b) {
  double ss = 0.0;
  std::size_t m = 0;
  for (std::size_t r = 0; r < n.rows(); ++r)
    for (std::size_t c = 0; c < n.cols(); ++c)
      if (n.interior(r, c)) {
        ss += n.at(r, c, b) * n.at(r, c, b);
        ++m;
      }
  return ss / static_cast<double>(m);
}

}  // namespace

TEST(ParaboloidFilter, KernelSumsToZeroWithEnergyFourNinths) {
  const double sum = std::accumulate(kParaboloidResidualKernel.begin(), kParaboloidResidualKernel.end(), 0.0);
  EXPECT_NEAR(sum, 0.0, 1e-15);
  double energy = 0.0;
  for (double w : kParaboloidResidualKernel) energy += w * w;
  EXPECT_NEAR(energy, 4.0 / 9.0, 1e-15);
}

TEST(ParaboloidFilter, AnnihilatesQuadratic) {
  const std::size_t rows = 9, cols = 11;
  std::vector<double> v(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = static_cast<double>(c), y = static_cast<double>(r);
      v[r * cols + c] = 1 + 2 * x + 3 * y + x * x - x * y + y * y;
    }
  const auto n = paraboloid_residual_filter(SpectralCube(rows, cols, 1, v));
  for (std::size_t r = 1; r + 1 < rows; ++r)
    for (std::size_t c = 1; c + 1 < cols; ++c) EXPECT_LE(std::abs(n.at(r, c, 0)), 1e-12);
}

TEST(ParaboloidFilter, ImpulseResponseMatchesLeastSquaresOracle) {
  const std::size_t rows = 7, cols = 7;
  std::vector<double> v(rows * cols, 0.0);
  v[3 * cols + 3] = 1.0;
  const auto n = paraboloid_residual_filter(SpectralCube(rows, cols, 1, v));
  const auto expected = oracle::quadratic_fit_residual_image(v, rows, cols);
  EXPECT_NEAR(n.at(3, 3, 0), 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(n.at(2, 3, 0), -2.0 / 9.0, 1e-15);
  EXPECT_NEAR(n.at(3, 4, 0), -2.0 / 9.0, 1e-15);
  EXPECT_NEAR(n.at(2, 2, 0), 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(n.at(4, 2, 0), 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(n.at(0, 0, 0), 0.0, 1e-15);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(n.values()[i], expected[i], 1e-12);
}

TEST(ParaboloidFilter, AgreesWithOracleOnRandomCubesIncludingBorders) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto cube = random_cube(6 + seed % 5, 5 + seed % 3, 3, seed);
    const auto n = paraboloid_residual_filter(cube);
    for (std::size_t b = 0; b < cube.bands(); ++b) {
      const auto expected = oracle::quadratic_fit_residual_image(
          band_of(cube, b), static_cast<long>(cube.rows()), static_cast<long>(cube.cols()));
      const auto got = band_of(n, b);
      for (std::size_t i = 0; i < got.size(); ++i) ASSERT_NEAR(got[i], expected[i], 1e-10);
    }
  }
}

TEST(ParaboloidFilter, InteriorMaskAndScaling) {
  const auto cube = random_cube(5, 6, 2, 3);
  const auto raw = paraboloid_residual_filter(cube);
  const auto unit = paraboloid_residual_filter(cube, NoiseScaling::unit_white_noise_gain);
  EXPECT_EQ(raw.interior_count(), 3u * 4u);
  EXPECT_FALSE(raw.interior(0, 3));
  EXPECT_FALSE(raw.interior(2, 5));
  EXPECT_TRUE(raw.interior(1, 1));
  EXPECT_EQ(unit.scaling(), NoiseScaling::unit_white_noise_gain);
  for (std::size_t i = 0; i < raw.values().size(); ++i)
    EXPECT_NEAR(unit.values()[i], 1.5 * raw.values()[i], 1e-14);
}

TEST(ParaboloidFilter, RejectsTinyGrids) {
  EXPECT_THROW(paraboloid_residual_filter(random_cube(2, 5, 1, 0)), UsageError);
  EXPECT_THROW(paraboloid_residual_filter(random_cube(5, 2, 1, 0)), UsageError);
  EXPECT_NO_THROW(paraboloid_residual_filter(random_cube(3, 3, 1, 0)));
}

TEST(ParaboloidFilter, WhiteNoiseGain) {
  const auto cube = random_cube(128, 128, 1, 11);
  EXPECT_NEAR(interior_mean_square(paraboloid_residual_filter(cube), 0) / (4.0 / 9.0), 1.0, 0.05);
  EXPECT_NEAR(interior_mean_square(paraboloid_residual_filter(cube, NoiseScaling::unit_white_noise_gain), 0),
              1.0, 0.05);
}

TEST(NoiseCovariance, ZeroResidualsGiveZero) {
  const auto n = paraboloid_residual_filter(SpectralCube(4, 4, 2, std::vector<double>(32, 3.0)));
  const auto cov = noise_covariance(n);
  EXPECT_EQ(cov.matrix.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(cov.samples, 4u);
  EXPECT_FALSE(cov.centered);
}

TEST(NoiseCovariance, UnitGainWhiteNoiseIsNearIdentity) {
  const auto cube = random_cube(256, 256, 4, 21);
  const auto cov = noise_covariance(paraboloid_residual_filter(cube, NoiseScaling::unit_white_noise_gain));
  EXPECT_EQ(cov.scaling, NoiseScaling::unit_white_noise_gain);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(cov.matrix(i, i), 1.0, 0.05);
    for (Eigen::Index j = 0; j < 4; ++j)
      if (i != j) {
        EXPECT_LE(std::abs(cov.matrix(i, j)), 0.05);
      }
  }
}

TEST(NoiseCovariance, DuplicatedBandsAreRankOne) {
  auto base = random_cube(20, 20, 1, 8);
  std::vector<double> v;
  for (double x : base.values()) {
    v.push_back(x);
    v.push_back(x);
  }
  const auto cov = noise_covariance(paraboloid_residual_filter(SpectralCube(20, 20, 2, v)));
  const double corr = cov.matrix(0, 1) / std::sqrt(cov.matrix(0, 0) * cov.matrix(1, 1));
  EXPECT_NEAR(corr, 1.0, 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.matrix);
  EXPECT_LE(std::abs(es.eigenvalues()(0)), 1e-12 * cov.matrix.trace());
}

TEST(NoiseCovariance, MatchesExplicitInteriorSum) {
  const auto cube = random_cube(7, 8, 3, 4);
  const auto n = paraboloid_residual_filter(cube);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(3, 3);
  std::size_t m = 0;
  for (std::size_t r = 1; r + 1 < 7; ++r)
    for (std::size_t c = 1; c + 1 < 8; ++c) {
      Eigen::Vector3d e(n.at(r, c, 0), n.at(r, c, 1), n.at(r, c, 2));
      expect += e * e.transpose();
      ++m;
    }
  expect /= static_cast<double>(m);
  const auto cov = noise_covariance(n);
  EXPECT_EQ(cov.samples, m);
  EXPECT_LE((cov.matrix - expect).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(NoiseCovariance, PooledOverCubesAndUnderdeterminedFlag) {
  const auto a = paraboloid_residual_filter(random_cube(5, 5, 3, 1));
  const auto b = paraboloid_residual_filter(random_cube(6, 4, 3, 2));
  const std::vector<NoiseCube> both{a, b};
  const auto cov = noise_covariance(both);
  EXPECT_EQ(cov.samples, 9u + 8u);
  const auto ca = noise_covariance(a), cb = noise_covariance(b);
  const Eigen::MatrixXd expect = (9.0 * ca.matrix + 8.0 * cb.matrix) / 17.0;
  EXPECT_LE((cov.matrix - expect).cwiseAbs().maxCoeff(), 1e-14);

  const auto thin = noise_covariance(paraboloid_residual_filter(random_cube(3, 4, 5, 1)));
  EXPECT_TRUE(thin.underdetermined);
  EXPECT_FALSE(cov.underdetermined);
}

TEST(SignalCovariance, Examples) {
  const auto constant = signal_covariance(SpectralCube(3, 3, 2, std::vector<double>(18, 4.0)));
  EXPECT_EQ(constant.matrix.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(constant.centered);
  EXPECT_DOUBLE_EQ(constant.mean(0), 4.0);

  const auto two = signal_covariance(SpectralCube(1, 2, 1, {-1.0, 1.0}));
  EXPECT_DOUBLE_EQ(two.matrix(0, 0), 1.0);

  const auto base = random_cube(4, 5, 1, 3);
  std::vector<double> v;
  for (double x : base.values()) v.insert(v.end(), {x, 2.0, x});
  const auto dup = signal_covariance(SpectralCube(4, 5, 3, v));
  EXPECT_TRUE(dup.matrix.row(0) == dup.matrix.row(2));
  EXPECT_TRUE(dup.matrix.col(0) == dup.matrix.col(2));

  EXPECT_THROW(signal_covariance(SpectralCube(1, 1, 2, {1.0, 2.0})), UsageError);
}

TEST(SignalCovariance, MatchesDirectFormula) {
  const auto cube = random_cube(9, 7, 4, 6);
  const Eigen::MatrixXd x = cube.as_matrix();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd c = x.rowwise() - mean;
  const Eigen::MatrixXd expect = c.transpose() * c / static_cast<double>(x.rows());
  const auto cov = signal_covariance(cube);
  EXPECT_LE((cov.matrix - expect).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LE((cov.mean - mean.transpose()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(CovarianceProperties, SymmetricPositiveSemidefinite) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto cube = random_cube(8, 8, 6, seed + 50);
    for (const auto& cov : {signal_covariance(cube), noise_covariance(paraboloid_residual_filter(cube))}) {
      const double scale = std::max(1.0, cov.matrix.cwiseAbs().maxCoeff());
      EXPECT_LE((cov.matrix - cov.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-12 * scale);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.matrix);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * cov.matrix.trace());
      EXPECT_GE(cov.matrix.diagonal().minCoeff(), 0.0);
    }
  }
}
