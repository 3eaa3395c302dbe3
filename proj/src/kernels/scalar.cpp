#include "capa/kernels.hpp"

namespace capa::kernels {
namespace {

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double centered_dot_scalar(const double* a, double ma, const double* b, double mb, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (a[i] - ma) * (b[i] - mb);
  return s;
}

void column_sums4_scalar(const double* rows, std::size_t n, double* out) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t r = 0; r < n; ++r)
    for (int j = 0; j < 4; ++j) s[j] += rows[4 * r + j];
  for (int j = 0; j < 4; ++j) out[j] = s[j];
}

void cross_moments4_scalar(const double* rows, std::size_t n, const double* mean, double* out) {
  double acc[16] = {};
  for (std::size_t r = 0; r < n; ++r) {
    double d[4];
    for (int j = 0; j < 4; ++j) d[j] = rows[4 * r + j] - mean[j];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) acc[4 * i + j] += d[i] * d[j];
  }
  for (int i = 0; i < 16; ++i) out[i] = acc[i];
}

void affine4_scalar(const double* rows, std::size_t n, const double* mean, const double* mat, double* out) {
  for (std::size_t r = 0; r < n; ++r) {
    double d[4];
    for (int j = 0; j < 4; ++j) d[j] = rows[4 * r + j] - mean[j];
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += d[k] * mat[4 * k + j];
      out[4 * r + j] = s;
    }
  }
}

}  // namespace

namespace detail {
const KernelTable scalar_table{Isa::scalar,         sum_scalar,           centered_dot_scalar,
                               column_sums4_scalar, cross_moments4_scalar, affine4_scalar};
}

}  // namespace capa::kernels
