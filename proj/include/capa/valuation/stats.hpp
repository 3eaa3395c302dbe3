#pragma once

#include <span>
#include <vector>

#include "capa/valuation/matrix.hpp"

namespace capa::valuation {

struct PearsonResult {
  double r = 0.0;
  double p = 1.0;  // two-sided, Student t with n − 2 degrees of freedom
};

/// Throws ValidationError on length mismatch or n < 3, UndefinedInput on zero variance.
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

/// Correlation of x and y after removing their least-squares projection on
/// the controls (with intercept). Computed from the covariance matrix via
/// the Schur complement. Returns 0 when x or y is fully explained by the
/// controls. Throws ValidationError when the controls are rank deficient.
double partial_correlation(std::span<const double> x, std::span<const double> y,
                           const std::vector<std::span<const double>>& controls);

/// Partial correlation of column `dim` (0-based) with target, controlling for the other three columns.
double partial_correlation(const Nx4Matrix& scores, std::span<const double> target, std::size_t dim);

/// 4×4 Pearson matrix of the columns; diagonal exactly 1.
Mat4x4 correlation_matrix(const Nx4Matrix& m);

}  // namespace capa::valuation
