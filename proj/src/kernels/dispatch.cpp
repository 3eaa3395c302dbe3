#include <cstdlib>
#include <string>

#include "capa/error.hpp"
#include "capa/kernels.hpp"

namespace capa::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) throw Error("SIMD variant not available: " + std::string(isa_name(isa)));
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return detail::avx2_table;
#endif
#if defined(__aarch64__)
    case Isa::neon: return detail::neon_table;
#endif
    default: return detail::scalar_table;
  }
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
    if (available(isa)) out.push_back(isa);
  return out;
}

namespace {

const KernelTable& select() {
  if (const char* forced = std::getenv("CAPA_SIMD")) {
    std::string_view want(forced);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (want == isa_name(isa) && available(isa)) return table(isa);
  }
  if (available(Isa::avx2)) return table(Isa::avx2);
  if (available(Isa::neon)) return table(Isa::neon);
  return detail::scalar_table;
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double mean(std::span<const double> x) {
  if (x.empty()) throw UndefinedInput("mean of an empty sequence");
  return sum(x) / static_cast<double>(x.size());
}

double centered_dot(std::span<const double> a, double ma, std::span<const double> b, double mb) {
  if (a.size() != b.size()) throw ValidationError("centered_dot: length mismatch");
  return active().centered_dot(a.data(), ma, b.data(), mb, a.size());
}

}  // namespace capa::kernels
