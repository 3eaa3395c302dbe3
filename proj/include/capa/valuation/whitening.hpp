#pragma once
// ZCA whitening of the four capability dimensions and the mid-rank rescale
// that maps whitened values back into [0, 1].

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "capa/valuation/matrix.hpp"

namespace capa::valuation {

inline constexpr double kDefaultZcaEpsilon = 1e-6;

struct WhiteningModel {
  Row4 mean{};
  Mat4x4 transform{};  // symmetric
  Row4 eigenvalues{};  // of the fitted covariance, ascending
  double epsilon = kDefaultZcaEpsilon;

  nlohmann::json to_json() const;
  static WhiteningModel from_json(const nlohmann::json& j);
};

/// Column means (sample mean) of an N×4 matrix.
Row4 column_means(const Nx4Matrix& m);
/// Sample covariance (N − 1 denominator).
Mat4x4 covariance(const Nx4Matrix& m);

/// U·diag(max(λ, ε))^(−1/2)·Uᵀ for a symmetric covariance matrix. Eigenvalues
/// below ε are floored at ε, so well-conditioned input is whitened exactly
/// and degenerate directions stay bounded.
Eigen::MatrixXd zca_transform(const Eigen::MatrixXd& covariance, double epsilon = kDefaultZcaEpsilon);

/// Throws ValidationError for N < 5 or when every column is constant.
WhiteningModel fit_zca(const Nx4Matrix& raw_v, double epsilon = kDefaultZcaEpsilon);

/// Rows mapped by (x − mean)·transform.
Nx4Matrix whiten(const Nx4Matrix& raw_v, const WhiteningModel& model);

/// Per-column mid-rank (#below + (#equal)/2)/N. Never reaches 0 or 1.
Nx4Matrix rank_rescale(const Nx4Matrix& values);
std::vector<double> mid_ranks(std::span<const double> values);

}  // namespace capa::valuation
