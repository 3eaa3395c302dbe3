#include "capa/valuation/stats.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "capa/error.hpp"
#include "capa/kernels.hpp"

namespace capa::valuation {

namespace {

// Residual variance below this share of the original is treated as "fully explained".
constexpr double kExplainedTolerance = 1e-20;

}  // namespace

PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson: length mismatch");
  if (x.size() < 3) throw ValidationError("pearson: need at least 3 points");
  const double mx = kernels::mean(x);
  const double my = kernels::mean(y);
  const double sxx = kernels::centered_dot(x, mx, x, mx);
  const double syy = kernels::centered_dot(y, my, y, my);
  if (sxx <= 0.0 || syy <= 0.0) throw UndefinedInput("pearson: zero variance");
  const double sxy = kernels::centered_dot(x, mx, y, my);
  double r = sxy / std::sqrt(sxx * syy);
  r = std::clamp(r, -1.0, 1.0);

  PearsonResult out{r, 0.0};
  const double df = static_cast<double>(x.size()) - 2.0;
  if (std::abs(r) < 1.0) {
    const double t = r * std::sqrt(df / (1.0 - r * r));
    boost::math::students_t dist(df);
    out.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    out.p = std::clamp(out.p, 0.0, 1.0);
  }
  return out;
}

double partial_correlation(std::span<const double> x, std::span<const double> y,
                           const std::vector<std::span<const double>>& controls) {
  const std::size_t n = x.size();
  if (y.size() != n) throw ValidationError("partial_correlation: length mismatch");
  for (const auto& c : controls)
    if (c.size() != n) throw ValidationError("partial_correlation: control length mismatch");
  if (n < controls.size() + 3) throw ValidationError("partial_correlation: too few observations");

  // Covariance (unnormalized) of [x, y, controls...].
  std::vector<std::span<const double>> cols{x, y};
  cols.insert(cols.end(), controls.begin(), controls.end());
  const std::size_t k = cols.size();
  std::vector<double> means(k);
  for (std::size_t i = 0; i < k; ++i) means[i] = kernels::mean(cols[i]);
  Eigen::MatrixXd s(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      const double v = kernels::centered_dot(cols[i], means[i], cols[j], means[j]);
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      s(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  if (s(0, 0) <= 0.0 || s(1, 1) <= 0.0) throw UndefinedInput("partial_correlation: zero variance");

  double sxx = s(0, 0);
  double syy = s(1, 1);
  double sxy = s(0, 1);
  if (!controls.empty()) {
    const auto m = static_cast<Eigen::Index>(controls.size());
    const Eigen::MatrixXd scc = s.bottomRightCorner(m, m);
    // Rank check on the scale-free correlation of the controls.
    const Eigen::VectorXd d = scc.diagonal();
    if (d.minCoeff() <= 0.0) throw ValidationError("partial_correlation: constant control column");
    const Eigen::VectorXd inv_sd = d.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd corr = inv_sd.asDiagonal() * scc * inv_sd.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < 1e-12 * eig.eigenvalues().maxCoeff())
      throw ValidationError("partial_correlation: control columns are rank deficient");

    const Eigen::MatrixXd sxc = s.topRightCorner(2, m);
    const Eigen::LDLT<Eigen::MatrixXd> solver(scc);
    const Eigen::MatrixXd reduced = sxc * solver.solve(sxc.transpose());
    sxx -= reduced(0, 0);
    syy -= reduced(1, 1);
    sxy -= reduced(0, 1);
  }
  if (sxx <= kExplainedTolerance * s(0, 0) || syy <= kExplainedTolerance * s(1, 1)) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double partial_correlation(const Nx4Matrix& scores, std::span<const double> target, std::size_t dim) {
  if (dim >= 4) throw ValidationError("partial_correlation: dimension out of range");
  if (scores.rows() != target.size()) throw ValidationError("partial_correlation: row count mismatch");
  if (scores.rows() < 6) throw ValidationError("partial_correlation: need at least 6 rows");
  std::array<std::vector<double>, 4> cols;
  for (std::size_t c = 0; c < 4; ++c) cols[c] = scores.column(c);
  std::vector<std::span<const double>> controls;
  for (std::size_t c = 0; c < 4; ++c)
    if (c != dim) controls.emplace_back(cols[c]);
  return partial_correlation(cols[dim], target, controls);
}

Mat4x4 correlation_matrix(const Nx4Matrix& m) {
  Mat4x4 out{};
  std::array<std::vector<double>, 4> cols;
  for (std::size_t c = 0; c < 4; ++c) cols[c] = m.column(c);
  for (std::size_t i = 0; i < 4; ++i) {
    out[5 * i] = 1.0;
    for (std::size_t j = i + 1; j < 4; ++j) {
      const double r = pearson(cols[i], cols[j]).r;
      out[4 * i + j] = r;
      out[4 * j + i] = r;
    }
  }
  return out;
}

}  // namespace capa::valuation
