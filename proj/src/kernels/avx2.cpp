// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "capa/kernels.hpp"

namespace capa::kernels {
namespace {

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double centered_dot_avx2(const double* a, double ma, const double* b, double mb, std::size_t n) {
  const __m256d vma = _mm256_set1_pd(ma);
  const __m256d vmb = _mm256_set1_pd(mb);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d da0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), vma);
    __m256d db0 = _mm256_sub_pd(_mm256_loadu_pd(b + i), vmb);
    __m256d da1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), vma);
    __m256d db1 = _mm256_sub_pd(_mm256_loadu_pd(b + i + 4), vmb);
    acc0 = _mm256_fmadd_pd(da0, db0, acc0);
    acc1 = _mm256_fmadd_pd(da1, db1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d da = _mm256_sub_pd(_mm256_loadu_pd(a + i), vma);
    __m256d db = _mm256_sub_pd(_mm256_loadu_pd(b + i), vmb);
    acc0 = _mm256_fmadd_pd(da, db, acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += (a[i] - ma) * (b[i] - mb);
  return s;
}

// One row of an N×4 block is exactly one __m256d.
void column_sums4_avx2(const double* rows, std::size_t n, double* out) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t r = 0;
  for (; r + 2 <= n; r += 2) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(rows + 4 * r));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(rows + 4 * r + 4));
  }
  if (r < n) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(rows + 4 * r));
  _mm256_storeu_pd(out, _mm256_add_pd(a0, a1));
}

void cross_moments4_avx2(const double* rows, std::size_t n, const double* mean, double* out) {
  const __m256d vm = _mm256_loadu_pd(mean);
  __m256d c0 = _mm256_setzero_pd();
  __m256d c1 = _mm256_setzero_pd();
  __m256d c2 = _mm256_setzero_pd();
  __m256d c3 = _mm256_setzero_pd();
  alignas(32) double d[4];
  for (std::size_t r = 0; r < n; ++r) {
    __m256d v = _mm256_sub_pd(_mm256_loadu_pd(rows + 4 * r), vm);
    _mm256_store_pd(d, v);
    c0 = _mm256_fmadd_pd(_mm256_set1_pd(d[0]), v, c0);
    c1 = _mm256_fmadd_pd(_mm256_set1_pd(d[1]), v, c1);
    c2 = _mm256_fmadd_pd(_mm256_set1_pd(d[2]), v, c2);
    c3 = _mm256_fmadd_pd(_mm256_set1_pd(d[3]), v, c3);
  }
  _mm256_storeu_pd(out, c0);
  _mm256_storeu_pd(out + 4, c1);
  _mm256_storeu_pd(out + 8, c2);
  _mm256_storeu_pd(out + 12, c3);
}

void affine4_avx2(const double* rows, std::size_t n, const double* mean, const double* mat, double* out) {
  const __m256d vm = _mm256_loadu_pd(mean);
  const __m256d m0 = _mm256_loadu_pd(mat);
  const __m256d m1 = _mm256_loadu_pd(mat + 4);
  const __m256d m2 = _mm256_loadu_pd(mat + 8);
  const __m256d m3 = _mm256_loadu_pd(mat + 12);
  alignas(32) double d[4];
  for (std::size_t r = 0; r < n; ++r) {
    _mm256_store_pd(d, _mm256_sub_pd(_mm256_loadu_pd(rows + 4 * r), vm));
    __m256d acc = _mm256_mul_pd(_mm256_set1_pd(d[0]), m0);
    acc = _mm256_fmadd_pd(_mm256_set1_pd(d[1]), m1, acc);
    acc = _mm256_fmadd_pd(_mm256_set1_pd(d[2]), m2, acc);
    acc = _mm256_fmadd_pd(_mm256_set1_pd(d[3]), m3, acc);
    _mm256_storeu_pd(out + 4 * r, acc);
  }
}

}  // namespace

namespace detail {
const KernelTable avx2_table{Isa::avx2,         sum_avx2,           centered_dot_avx2,
                             column_sums4_avx2, cross_moments4_avx2, affine4_avx2};
}

}  // namespace capa::kernels
