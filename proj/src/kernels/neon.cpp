#include <arm_neon.h>

#include "capa/kernels.hpp"

namespace capa::kernels {
namespace {

double sum_neon(const double* x, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  float64x2_t a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vaddq_f64(a0, vld1q_f64(x + i));
    a1 = vaddq_f64(a1, vld1q_f64(x + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double centered_dot_neon(const double* a, double ma, const double* b, double mb, std::size_t n) {
  const float64x2_t vma = vdupq_n_f64(ma);
  const float64x2_t vmb = vdupq_n_f64(mb);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t da = vsubq_f64(vld1q_f64(a + i), vma);
    float64x2_t db = vsubq_f64(vld1q_f64(b + i), vmb);
    acc = vfmaq_f64(acc, da, db);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += (a[i] - ma) * (b[i] - mb);
  return s;
}

void column_sums4_neon(const double* rows, std::size_t n, double* out) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  for (std::size_t r = 0; r < n; ++r) {
    lo = vaddq_f64(lo, vld1q_f64(rows + 4 * r));
    hi = vaddq_f64(hi, vld1q_f64(rows + 4 * r + 2));
  }
  vst1q_f64(out, lo);
  vst1q_f64(out + 2, hi);
}

void cross_moments4_neon(const double* rows, std::size_t n, const double* mean, double* out) {
  const float64x2_t mlo = vld1q_f64(mean);
  const float64x2_t mhi = vld1q_f64(mean + 2);
  float64x2_t acc[8];
  for (auto& a : acc) a = vdupq_n_f64(0.0);
  for (std::size_t r = 0; r < n; ++r) {
    float64x2_t dlo = vsubq_f64(vld1q_f64(rows + 4 * r), mlo);
    float64x2_t dhi = vsubq_f64(vld1q_f64(rows + 4 * r + 2), mhi);
    const double d[4] = {vgetq_lane_f64(dlo, 0), vgetq_lane_f64(dlo, 1), vgetq_lane_f64(dhi, 0),
                         vgetq_lane_f64(dhi, 1)};
    for (int i = 0; i < 4; ++i) {
      acc[2 * i] = vfmaq_n_f64(acc[2 * i], dlo, d[i]);
      acc[2 * i + 1] = vfmaq_n_f64(acc[2 * i + 1], dhi, d[i]);
    }
  }
  for (int i = 0; i < 4; ++i) {
    vst1q_f64(out + 4 * i, acc[2 * i]);
    vst1q_f64(out + 4 * i + 2, acc[2 * i + 1]);
  }
}

void affine4_neon(const double* rows, std::size_t n, const double* mean, const double* mat, double* out) {
  const float64x2_t mlo = vld1q_f64(mean);
  const float64x2_t mhi = vld1q_f64(mean + 2);
  for (std::size_t r = 0; r < n; ++r) {
    float64x2_t dlo = vsubq_f64(vld1q_f64(rows + 4 * r), mlo);
    float64x2_t dhi = vsubq_f64(vld1q_f64(rows + 4 * r + 2), mhi);
    const double d[4] = {vgetq_lane_f64(dlo, 0), vgetq_lane_f64(dlo, 1), vgetq_lane_f64(dhi, 0),
                         vgetq_lane_f64(dhi, 1)};
    float64x2_t olo = vdupq_n_f64(0.0);
    float64x2_t ohi = vdupq_n_f64(0.0);
    for (int k = 0; k < 4; ++k) {
      olo = vfmaq_n_f64(olo, vld1q_f64(mat + 4 * k), d[k]);
      ohi = vfmaq_n_f64(ohi, vld1q_f64(mat + 4 * k + 2), d[k]);
    }
    vst1q_f64(out + 4 * r, olo);
    vst1q_f64(out + 4 * r + 2, ohi);
  }
}

}  // namespace

namespace detail {
const KernelTable neon_table{Isa::neon,         sum_neon,           centered_dot_neon,
                             column_sums4_neon, cross_moments4_neon, affine4_neon};
}

}  // namespace capa::kernels
