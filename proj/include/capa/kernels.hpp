#pragma once
// Numeric inner loops with a scalar reference and SIMD variants.
//
// Every kernel has one scalar implementation (the reference) and, where the
// target supports it, an AVX2+FMA or NEON variant. The active variant is
// chosen once at startup from the CPU features and can be forced with the
// CAPA_SIMD environment variable (scalar | avx2 | neon).

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace capa::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// Function table for one instruction set. Matrices are N×4 row-major.
struct KernelTable {
  Isa isa;
  double (*sum)(const double* x, std::size_t n);
  // Σ (a_i − ma)(b_i − mb)
  double (*centered_dot)(const double* a, double ma, const double* b, double mb, std::size_t n);
  // out[4] = column sums of an N×4 row-major block
  void (*column_sums4)(const double* rows, std::size_t n, double* out);
  // out[16] = Σ_r (x_r − mean)(x_r − mean)ᵀ over an N×4 row-major block
  void (*cross_moments4)(const double* rows, std::size_t n, const double* mean, double* out);
  // out_r = (x_r − mean) · mat, mat 4×4 row-major
  void (*affine4)(const double* rows, std::size_t n, const double* mean, const double* mat, double* out);
};

bool available(Isa isa);
/// Throws capa::Error when the instruction set is not compiled in or not supported by the CPU.
const KernelTable& table(Isa isa);
const KernelTable& active();
/// All variants usable on this machine, scalar first.
std::vector<Isa> available_isas();

// Span conveniences over the active table.
double sum(std::span<const double> x);
double mean(std::span<const double> x);
double centered_dot(std::span<const double> a, double ma, std::span<const double> b, double mb);

namespace detail {
extern const KernelTable scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable avx2_table;
#endif
#if defined(__aarch64__)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace capa::kernels
