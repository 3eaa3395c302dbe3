#include "capa/valuation/whitening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "capa/error.hpp"
#include "capa/kernels.hpp"

namespace capa::valuation {

using nlohmann::json;

Row4 column_means(const Nx4Matrix& m) {
  if (m.empty()) throw UndefinedInput("column_means: empty matrix");
  Row4 sums{};
  kernels::active().column_sums4(m.data(), m.rows(), sums.data());
  for (auto& s : sums) s /= static_cast<double>(m.rows());
  return sums;
}

Mat4x4 covariance(const Nx4Matrix& m) {
  if (m.rows() < 2) throw UndefinedInput("covariance: need at least 2 rows");
  const Row4 mean = column_means(m);
  Mat4x4 cov{};
  kernels::active().cross_moments4(m.data(), m.rows(), mean.data(), cov.data());
  for (auto& c : cov) c /= static_cast<double>(m.rows() - 1);
  return cov;
}

Eigen::MatrixXd zca_transform(const Eigen::MatrixXd& cov, double epsilon) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) throw ValidationError("zca_transform: covariance must be square");
  if (!(epsilon > 0.0)) throw ValidationError("zca_transform: epsilon must be positive");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw Error("zca_transform: eigendecomposition failed");
  Eigen::VectorXd inv_sqrt = eig.eigenvalues().unaryExpr([&](double l) { return 1.0 / std::sqrt(std::max(l, epsilon)); });
  Eigen::MatrixXd t = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (t + t.transpose());
}

WhiteningModel fit_zca(const Nx4Matrix& raw_v, double epsilon) {
  if (raw_v.rows() < 5) throw ValidationError("fit_zca: need at least 5 rows, got " + std::to_string(raw_v.rows()));
  const Mat4x4 cov = covariance(raw_v);
  Eigen::Matrix4d c;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) c(i, j) = cov[static_cast<std::size_t>(4 * i + j)];
  if (c.diagonal().maxCoeff() <= 0.0) throw ValidationError("fit_zca: every column is constant");

  WhiteningModel model;
  model.epsilon = epsilon;
  model.mean = column_means(raw_v);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(c, Eigen::EigenvaluesOnly);
  for (int i = 0; i < 4; ++i) model.eigenvalues[static_cast<std::size_t>(i)] = eig.eigenvalues()(i);
  const Eigen::MatrixXd t = zca_transform(c, epsilon);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) model.transform[static_cast<std::size_t>(4 * i + j)] = t(i, j);
  return model;
}

Nx4Matrix whiten(const Nx4Matrix& raw_v, const WhiteningModel& model) {
  Nx4Matrix out(raw_v.rows());
  kernels::active().affine4(raw_v.data(), raw_v.rows(), model.mean.data(), model.transform.data(), out.data());
  return out;
}

std::vector<double> mid_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i) + 0.5 * static_cast<double>(j - i)) / static_cast<double>(n);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

Nx4Matrix rank_rescale(const Nx4Matrix& values) {
  Nx4Matrix out(values.rows());
  for (std::size_t c = 0; c < 4; ++c) {
    const auto col = values.column(c);
    const auto ranks = mid_ranks(col);
    for (std::size_t r = 0; r < ranks.size(); ++r) out(r, c) = ranks[r];
  }
  return out;
}

json WhiteningModel::to_json() const {
  return json{{"mean", mean}, {"transform", transform}, {"eigenvalues", eigenvalues}, {"epsilon", epsilon}};
}

WhiteningModel WhiteningModel::from_json(const json& j) {
  WhiteningModel m;
  try {
    m.mean = j.at("mean").get<Row4>();
    m.transform = j.at("transform").get<Mat4x4>();
    m.eigenvalues = j.value("eigenvalues", Row4{});
    m.epsilon = j.value("epsilon", kDefaultZcaEpsilon);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("whitening model: ") + e.what());
  }
  return m;
}

}  // namespace capa::valuation
