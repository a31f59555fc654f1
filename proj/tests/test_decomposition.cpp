#include <gtest/gtest.h>

#include <cmath>

#include "mnfret/decomposition.hpp"
#include "mnfret/error.hpp"
#include "mnfret/noise.hpp"
#include "mnfret/serialization.hpp"
#include "mnfret/synth.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mnfret;

namespace {

CovarianceEstimate estimate(const Eigen::MatrixXd& m, bool centered = true) {
  CovarianceEstimate e;
  e.matrix = m;
  e.centered = centered;
  if (centered) e.mean = Eigen::VectorXd::Zero(m.rows());
  e.samples = 1000;
  return e;
}

Eigen::VectorXd separated_spectrum(Eigen::Index d, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  Eigen::VectorXd s(d);
  double v = 0.5;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    v += u(gen);
    s(i) = v;
  }
  return s;
}

std::vector<double> score_band(const ScoreCube& s, std::size_t k) {
  std::vector<double> out(s.pixels());
  for (std::size_t i = 0; i < s.pixels(); ++i) out[i] = s.pixel(i)[k];
  return out;
}

}  // namespace

TEST(Pca, RankOneLine) {
  std::vector<double> v;
  for (int t = -3; t <= 3; ++t) v.insert(v.end(), {double(t), 2.0 * t});
  const auto basis = fit_pca(signal_covariance(SpectralCube(1, 7, 2, v)), 1);
  EXPECT_NEAR(basis.components(0, 0), 1.0 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(basis.components(1, 0), 2.0 / std::sqrt(5.0), 1e-12);
}

TEST(Pca, TwoByTwoAgainstBruteForce) {
  Eigen::Matrix2d s;
  s << 2, 1, 1, 2;
  const auto basis = fit_pca(estimate(s), 2);
  const auto ref = oracle::brute_force_generalized(s, Eigen::Matrix2d::Identity());
  EXPECT_NEAR(basis.eigenvalues(0), 3.0, 1e-12);
  EXPECT_NEAR(basis.eigenvalues(1), 1.0, 1e-12);
  EXPECT_LE((basis.eigenvalues - ref.values).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((basis.components - ref.vectors).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(basis.components(0, 0), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(std::abs(basis.components(0, 1)), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(basis.components(0, 1) * basis.components(1, 1), -0.5, 1e-12);
}

TEST(Pca, OrthonormalAndScoreVarianceEqualsEigenvalue) {
  const auto cube = testing_support::random_cube(20, 20, 6, 3);
  const auto cov = signal_covariance(cube);
  const auto basis = fit_pca(cov, 4);
  EXPECT_LE((basis.components.transpose() * basis.components - Eigen::MatrixXd::Identity(4, 4))
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
  for (Eigen::Index i = 1; i < 4; ++i) EXPECT_LE(basis.eigenvalues(i), basis.eigenvalues(i - 1));
  const auto scores = project(cube, basis);
  const RowMatrix s = scores.as_matrix();
  for (Eigen::Index j = 0; j < 4; ++j) {
    const double var = s.col(j).squaredNorm() / static_cast<double>(s.rows());
    EXPECT_NEAR(var / basis.eigenvalues(j), 1.0, 1e-8);
  }
  EXPECT_NEAR(basis.eigenvalue_total, cov.matrix.trace(), 1e-10 * cov.matrix.trace());
}

TEST(Pca, Errors) {
  Eigen::Matrix2d s;
  s << 2, 1, 1, 2;
  EXPECT_THROW(fit_pca(estimate(s), 0), UsageError);
  EXPECT_THROW(fit_pca(estimate(s), 3), UsageError);
  s(0, 1) = 1.1;
  EXPECT_THROW(fit_pca(estimate(s), 1), UsageError);
}

TEST(Mnf, HandWorkedDiagonalPair) {
  const Eigen::Matrix2d s = Eigen::Vector2d(5, 5).asDiagonal();
  const Eigen::Matrix2d n = Eigen::Vector2d(1, 4).asDiagonal();
  const auto basis = fit_mnf(estimate(s), estimate(n, false), 2, 0.0);
  EXPECT_NEAR(basis.eigenvalues(0), 5.0, 1e-12);
  EXPECT_NEAR(basis.eigenvalues(1), 1.25, 1e-12);
  EXPECT_NEAR(basis.components(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(basis.components(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(basis.components(1, 1), 0.5, 1e-12);
  const auto ref = oracle::brute_force_generalized(s, n);
  EXPECT_LE((basis.components - ref.vectors).cwiseAbs().maxCoeff(), 1e-12);
  const auto frac = signal_fraction(basis);
  EXPECT_NEAR(frac[0], 0.8, 1e-12);
  EXPECT_NEAR(frac[1], 0.2, 1e-12);
}

TEST(Mnf, MatchesBruteForceGeneralizedSolve) {
  auto gen = oracle::rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index d = 2 + trial % 7;
    const Eigen::MatrixXd a = oracle::gaussian_matrix(d, d, gen);
    const Eigen::MatrixXd n = a * a.transpose() + 0.3 * Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd l = n.llt().matrixL();
    const Eigen::MatrixXd s = l * oracle::spd_with_spectrum(separated_spectrum(d, gen), gen) * l.transpose();
    const auto basis = fit_mnf(estimate(s), estimate(n, false), static_cast<std::size_t>(d), 0.0);
    const auto ref = oracle::brute_force_generalized(s, n);
    const double vscale = ref.vectors.cwiseAbs().maxCoeff();
    EXPECT_LE((basis.eigenvalues - ref.values).cwiseAbs().maxCoeff(), 1e-10 * ref.values(0)) << trial;
    EXPECT_LE((basis.components - ref.vectors).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, vscale)) << trial;
  }
}

TEST(Mnf, NoiseMetricOrthonormalityAndRayleighQuotients) {
  auto gen = oracle::rng(9);
  const Eigen::Index d = 7;
  const Eigen::MatrixXd a = oracle::gaussian_matrix(d, d, gen);
  const Eigen::MatrixXd n = a * a.transpose() + Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd s = oracle::spd_with_spectrum(separated_spectrum(d, gen), gen);
  const auto basis = fit_mnf(estimate(s), estimate(n, false), 5);
  ASSERT_EQ(basis.noise_metric.rows(), d);
  const Eigen::MatrixXd& w = basis.components;
  EXPECT_LE((w.transpose() * basis.noise_metric * w - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(),
            1e-8);
  for (Eigen::Index j = 0; j < 5; ++j) {
    const double q = w.col(j).dot(s * w.col(j)) / w.col(j).dot(basis.noise_metric * w.col(j));
    EXPECT_NEAR(q / basis.eigenvalues(j), 1.0, 1e-8);
    if (j > 0) {
      EXPECT_LE(basis.eigenvalues(j), basis.eigenvalues(j - 1));
    }
  }
  EXPECT_DOUBLE_EQ(basis.noise_ridge, kDefaultMnfRidge);
}

TEST(Mnf, IdentityNoiseReducesToPca) {
  auto gen = oracle::rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 8;
    const Eigen::MatrixXd s = oracle::spd_with_spectrum(separated_spectrum(d, gen), gen);
    const auto pca = fit_pca(estimate(s), 8);
    const auto mnf = fit_mnf(estimate(s), estimate(Eigen::MatrixXd::Identity(d, d), false), 8);
    for (Eigen::Index k = 1; k <= d; ++k)
      EXPECT_LE(oracle::subspace_sine(pca.components.leftCols(k), mnf.components.leftCols(k)), 1e-8);
  }
}

TEST(Mnf, ErrorsAndCholeskyFailure) {
  const Eigen::Matrix2d s = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d n;
  n << 1, 0, 0, -1;
  try {
    fit_mnf(estimate(s), estimate(n, false), 1, 0.0);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("ridge"), std::string::npos);
  }
  EXPECT_THROW(fit_mnf(estimate(s), estimate(Eigen::Matrix3d::Identity(), false), 1), UsageError);
  EXPECT_THROW(fit_mnf(estimate(s), estimate(Eigen::Matrix2d::Identity(), false), 3), UsageError);
  EXPECT_THROW(fit_mnf(estimate(s), estimate(Eigen::Matrix2d::Identity(), false), 1, -1.0), UsageError);
  // Singular noise rescued by the ridge.
  const Eigen::Matrix2d singular = Eigen::Vector2d(1, 0).asDiagonal();
  EXPECT_THROW(fit_mnf(estimate(s), estimate(singular, false), 1, 0.0), NumericalError);
  EXPECT_NO_THROW(fit_mnf(estimate(s), estimate(singular, false), 1, 1e-6));
}

TEST(Mnf, InvariantUnderBandTransform) {
  SceneConfig c;
  c.rows = 48;
  c.cols = 40;
  c.bands = 8;
  c.levels = 3;
  c.latent_count = 5;
  const auto cube = generate_scene(c).spectra;
  auto gen = oracle::rng(3);
  const Eigen::MatrixXd t = oracle::gaussian_matrix(8, 8, gen) + 3.0 * Eigen::MatrixXd::Identity(8, 8);
  const RowMatrix moved = cube.as_matrix() * t.transpose();
  const SpectralCube other(cube.rows(), cube.cols(), 8, std::vector<double>(moved.data(), moved.data() + moved.size()));
  const auto fit = [](const SpectralCube& x) {
    return fit_mnf(signal_covariance(x), noise_covariance(paraboloid_residual_filter(x)), 8);
  };
  const RowMatrix a = project(cube, fit(cube)).as_matrix();
  const RowMatrix b = project(other, fit(other)).as_matrix();
  for (Eigen::Index j = 0; j < 8; ++j) {
    const double sign = a.col(j).dot(b.col(j)) >= 0 ? 1.0 : -1.0;
    EXPECT_LE((a.col(j) - sign * b.col(j)).cwiseAbs().maxCoeff(), 1e-6 * a.col(j).cwiseAbs().maxCoeff()) << j;
  }
}

TEST(Mnf, SmootherScoresThanPcaOnStructuredNoiseScene) {
  SceneConfig c;
  const auto scene = generate_scene(c);
  const auto& x = scene.spectra;
  const auto cov = signal_covariance(x);
  const auto pca = project(x, fit_pca(cov, 20));
  const auto mnf = project(x, fit_mnf(cov, noise_covariance(paraboloid_residual_filter(x)), 20));
  int wins = 0;
  for (std::size_t j = 0; j < 20; ++j) {
    const long rows = static_cast<long>(x.rows()), cols = static_cast<long>(x.cols());
    if (oracle::lag1_autocorrelation(score_band(mnf, j), rows, cols) >=
        oracle::lag1_autocorrelation(score_band(pca, j), rows, cols))
      ++wins;
  }
  EXPECT_GE(wins, 16);
}

TEST(SignalFraction, Examples) {
  LinearBasis b;
  b.method = Method::mnf;
  b.components = Eigen::MatrixXd::Identity(4, 4);
  b.eigenvalues = Eigen::Vector4d(1e300, 5.0, 1.0, 0.5);
  const auto f = signal_fraction(b);
  EXPECT_NEAR(f[0], 1.0, 1e-15);
  EXPECT_NEAR(f[1], 0.8, 1e-15);
  EXPECT_EQ(f[2], 0.0);
  EXPECT_EQ(f[3], 0.0);
  b.method = Method::pca;
  EXPECT_THROW(signal_fraction(b), UsageError);
}

TEST(EigenvalueCurve, Examples) {
  LinearBasis b;
  b.components = Eigen::MatrixXd::Identity(2, 2);
  b.eigenvalues = Eigen::Vector2d(3, 1);
  b.eigenvalue_total = 4;
  auto curve = eigenvalue_curve(b);
  EXPECT_DOUBLE_EQ(curve.cumulative[0], 0.75);
  EXPECT_DOUBLE_EQ(curve.cumulative[1], 1.0);
  EXPECT_FALSE(curve.partial);

  b.components = Eigen::MatrixXd::Identity(5, 5);
  b.eigenvalues = Eigen::VectorXd::Constant(5, 2.0);
  b.eigenvalue_total = 10;
  curve = eigenvalue_curve(b);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(curve.cumulative[i], (i + 1) / 5.0, 1e-15);

  b.components = Eigen::MatrixXd::Identity(5, 2);
  b.eigenvalues = Eigen::Vector2d(3, 1);
  curve = eigenvalue_curve(b);
  EXPECT_TRUE(curve.partial);
  EXPECT_DOUBLE_EQ(curve.cumulative.back(), 1.0);
}

TEST(SignConvention, LargestMagnitudePositiveTiesToLowestIndex) {
  Eigen::MatrixXd m(3, 3);
  m << -0.2, 0.5, -0.5,  //
      -0.9, -0.5, 0.5,   //
      0.1, 0.1, 0.1;
  apply_sign_convention(m);
  EXPECT_GT(m(1, 0), 0);
  EXPECT_GT(m(0, 1), 0);
  EXPECT_GT(m(0, 2), 0);
  EXPECT_LT(m(1, 2), 0);
}

TEST(Projection, MeanMapsToZeroAndFullPcaReconstructs) {
  const auto cube = testing_support::random_cube(6, 5, 4, 2);
  const auto basis = fit_pca(signal_covariance(cube), 4);
  const SpectralCube mean_cube(1, 1, 4, std::vector<double>(basis.mean.data(), basis.mean.data() + 4));
  const auto zero = project(mean_cube, basis);
  for (double v : zero.values()) EXPECT_NEAR(v, 0.0, 1e-15);

  const RowMatrix scores = project(cube, basis).as_matrix();
  const RowMatrix back = (scores * basis.components.transpose()).rowwise() + basis.mean.transpose();
  EXPECT_LE((back - cube.as_matrix()).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_THROW(project(testing_support::random_cube(2, 2, 3, 0), basis), UsageError);
}

TEST(LinearBasis, LeadingAndIdentity) {
  const auto cube = testing_support::random_cube(6, 5, 4, 2);
  const auto basis = fit_pca(signal_covariance(cube), 4);
  const auto two = basis.leading(2);
  EXPECT_EQ(two.size(), 2u);
  EXPECT_TRUE(two.components == basis.components.leftCols(2));
  EXPECT_EQ(two.eigenvalue_total, basis.eigenvalue_total);
  EXPECT_NE(two.id(), basis.id());
  EXPECT_EQ(basis.id(), fit_pca(signal_covariance(cube), 4).id());
  EXPECT_EQ(project(cube, two).as_matrix(), project(cube, basis).leading(2).as_matrix());
}

TEST(Serialization, BasisRoundTripAndPcaCheck) {
  testing_support::TempDir dir;
  const auto cube = testing_support::random_cube(10, 10, 5, 7);
  const auto cov = signal_covariance(cube);
  const auto mnf = fit_mnf(cov, noise_covariance(paraboloid_residual_filter(cube)), 3);
  save_basis(mnf, dir / "mnf");
  const auto back = load_basis(dir / "mnf");
  EXPECT_EQ(back.method, Method::mnf);
  EXPECT_TRUE(back.components == mnf.components);
  EXPECT_TRUE(back.mean == mnf.mean);
  EXPECT_TRUE(back.eigenvalues == mnf.eigenvalues);
  EXPECT_EQ(back.eigenvalue_total, mnf.eigenvalue_total);
  EXPECT_EQ(back.noise_ridge, mnf.noise_ridge);

  const auto pca = fit_pca(cov, 3);
  save_basis(pca, dir / "pca");
  EXPECT_TRUE(load_basis(dir / "pca.json").components == pca.components);
  auto broken = pca;
  broken.components(0, 0) += 1e-3;
  save_basis(broken, dir / "broken");
  EXPECT_THROW(load_basis(dir / "broken"), NumericalError);
  EXPECT_THROW(load_basis(dir / "missing"), IoError);
}
