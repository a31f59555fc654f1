#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed * 7919 + 17); }

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(gen);
  return m;
}

inline std::vector<double> gaussian_values(std::size_t count, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(count);
  for (auto& x : v) x = normal(gen);
  return v;
}

// Reflection without repeating the edge sample.
inline long mirror(long i, long n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

// Residual at the centre of a 3x3 window after a least-squares fit of
// (1, x, y, x^2, y^2, xy); window is row-major with y = row offset.
inline double quadratic_fit_residual(const double window[9]) {
  Eigen::Matrix<double, 9, 6> a;
  Eigen::Matrix<double, 9, 1> z;
  int i = 0;
  for (int y = -1; y <= 1; ++y) {
    for (int x = -1; x <= 1; ++x, ++i) {
      a.row(i) << 1.0, x, y, x * x, y * y, x * y;
      z(i) = window[i];
    }
  }
  const Eigen::Matrix<double, 6, 1> coef = a.colPivHouseholderQr().solve(z);
  return window[4] - coef(0);
}

// Explicitly padded image, then the LS residual per pixel.
inline std::vector<double> quadratic_fit_residual_image(const std::vector<double>& image, long rows,
                                                        long cols) {
  const long pr = rows + 2;
  const long pc = cols + 2;
  std::vector<double> padded(static_cast<std::size_t>(pr * pc));
  for (long r = 0; r < pr; ++r)
    for (long c = 0; c < pc; ++c)
      padded[static_cast<std::size_t>(r * pc + c)] =
          image[static_cast<std::size_t>(mirror(r - 1, rows) * cols + mirror(c - 1, cols))];
  std::vector<double> out(image.size());
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      double w[9];
      for (int dr = 0; dr < 3; ++dr)
        for (int dc = 0; dc < 3; ++dc)
          w[dr * 3 + dc] = padded[static_cast<std::size_t>((r + dr) * pc + c + dc)];
      out[static_cast<std::size_t>(r * cols + c)] = quadratic_fit_residual(w);
    }
  }
  return out;
}

// Window of an image read from an explicitly mirror-padded copy, row-major
// over offsets.
inline std::vector<double> padded_window(const std::vector<double>& image, long rows, long cols,
                                         long row, long col, long w) {
  const long r = (w - 1) / 2;
  const long pr = rows + 2 * r;
  const long pc = cols + 2 * r;
  std::vector<double> padded(static_cast<std::size_t>(pr * pc));
  for (long i = 0; i < pr; ++i)
    for (long j = 0; j < pc; ++j)
      padded[static_cast<std::size_t>(i * pc + j)] =
          image[static_cast<std::size_t>(mirror(i - r, rows) * cols + mirror(j - r, cols))];
  std::vector<double> out;
  for (long i = 0; i < w; ++i)
    for (long j = 0; j < w; ++j) out.push_back(padded[static_cast<std::size_t>((row + i) * pc + col + j)]);
  return out;
}

inline void largest_abs_positive(Eigen::MatrixXd& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.rows(); ++i)
      if (std::abs(v(i, j)) > std::abs(v(best, j))) best = i;
    if (v(best, j) < 0) v.col(j) = -v.col(j);
  }
}

struct GeneralizedEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Dense non-symmetric solve of inv(N) S, eigenvectors normalized so that
// v^T N v = 1, sorted descending.
inline GeneralizedEigen brute_force_generalized(const Eigen::MatrixXd& s, const Eigen::MatrixXd& n) {
  const Eigen::MatrixXd m = n.fullPivLu().solve(s);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd values = es.eigenvalues().real();
  const Eigen::MatrixXd vectors = es.eigenvectors().real();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values(a) > values(b); });
  GeneralizedEigen out;
  out.values.resize(values.size());
  out.vectors.resize(vectors.rows(), vectors.cols());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const auto src = order[static_cast<std::size_t>(i)];
    out.values(i) = values(src);
    Eigen::VectorXd v = vectors.col(src);
    v /= std::sqrt(v.dot(n * v));
    out.vectors.col(i) = v;
  }
  largest_abs_positive(out.vectors);
  return out;
}

// Largest principal-angle sine between span(a) and span(b).
inline double subspace_sine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd qa = a.householderQr().householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXd qb = b.householderQr().householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
  const Eigen::MatrixXd residual = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
  return svd.singularValues()(0);
}

// Random SPD matrix with eigenvalues `spectrum` in a random orthonormal frame.
inline Eigen::MatrixXd spd_with_spectrum(const Eigen::VectorXd& spectrum, std::mt19937_64& gen) {
  const auto d = spectrum.size();
  const Eigen::MatrixXd q = gaussian_matrix(d, d, gen).householderQr().householderQ();
  return q * spectrum.asDiagonal() * q.transpose();
}

// Two columns with sample correlation exactly rho (population moments).
inline Eigen::MatrixXd correlated_pair(Eigen::Index n, double rho, std::mt19937_64& gen) {
  Eigen::MatrixXd raw = gaussian_matrix(n, 2, gen);
  raw.rowwise() -= raw.colwise().mean();
  Eigen::VectorXd u = raw.col(0).normalized();
  Eigen::VectorXd v = raw.col(1) - u * u.dot(raw.col(1));
  v.normalize();
  Eigen::MatrixXd out(n, 2);
  out.col(0) = u;
  out.col(1) = rho * u + std::sqrt(1.0 - rho * rho) * v;
  return out;
}

// Ordinary least squares with intercept via QR on [1, X].
inline Eigen::MatrixXd ols_with_intercept(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  Eigen::MatrixXd a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  return a.colPivHouseholderQr().solve(y);
}

inline double lag1_autocorrelation(const std::vector<double>& image, long rows, long cols) {
  double mean = 0.0;
  for (double v : image) mean += v;
  mean /= static_cast<double>(image.size());
  double num = 0.0, den = 0.0;
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      const double a = image[static_cast<std::size_t>(r * cols + c)] - mean;
      den += a * a;
      if (r + 1 < rows) num += a * (image[static_cast<std::size_t>((r + 1) * cols + c)] - mean);
    }
  }
  return num / den * static_cast<double>(rows * cols) / static_cast<double>((rows - 1) * cols);
}

}  // namespace oracle
