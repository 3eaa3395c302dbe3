#include <doctest.h>

#include <cmath>
#include <vector>

#include "capa/kernels.hpp"
#include "capa/rng.hpp"

using namespace capa;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  rng::Engine g(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng::normal(g) * 3.0 + 1.5;
  return v;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a) + std::abs(b)); }

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar table is always available and listed first") {
  auto isas = kernels::available_isas();
  REQUIRE(!isas.empty());
  CHECK(isas.front() == kernels::Isa::scalar);
  CHECK(kernels::available(kernels::Isa::scalar));
  CHECK(kernels::isa_name(kernels::Isa::avx2) == "avx2");
}

TEST_CASE("every variant matches the scalar reference") {
  const auto& ref = kernels::table(kernels::Isa::scalar);
  for (auto isa : kernels::available_isas()) {
    const auto& t = kernels::table(isa);
    CAPTURE(kernels::isa_name(isa));
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 1000u, 1001u}) {
      CAPTURE(n);
      auto a = random_values(n, 10 + n);
      auto b = random_values(n, 500 + n);
      CHECK(close(t.sum(a.data(), n), ref.sum(a.data(), n)));
      CHECK(close(t.centered_dot(a.data(), 0.3, b.data(), -1.2, n), ref.centered_dot(a.data(), 0.3, b.data(), -1.2, n)));

      auto rows = random_values(4 * n, 900 + n);
      double s1[4], s2[4];
      t.column_sums4(rows.data(), n, s1);
      ref.column_sums4(rows.data(), n, s2);
      for (int c = 0; c < 4; ++c) CHECK(close(s1[c], s2[c]));

      const double mean[4] = {0.5, -0.25, 1.0, 2.0};
      double m1[16], m2[16];
      t.cross_moments4(rows.data(), n, mean, m1);
      ref.cross_moments4(rows.data(), n, mean, m2);
      for (int c = 0; c < 16; ++c) CHECK(close(m1[c], m2[c]));

      auto mat = random_values(16, 77);
      std::vector<double> o1(4 * n), o2(4 * n);
      t.affine4(rows.data(), n, mean, mat.data(), o1.data());
      ref.affine4(rows.data(), n, mean, mat.data(), o2.data());
      for (std::size_t i = 0; i < 4 * n; ++i) CHECK(close(o1[i], o2[i]));
    }
  }
}

TEST_CASE("scalar kernels against direct loops") {
  const auto& t = kernels::table(kernels::Isa::scalar);
  std::vector<double> rows{1, 2, 3, 4, 5, 6, 7, 8};
  double s[4];
  t.column_sums4(rows.data(), 2, s);
  CHECK(s[0] == 6);
  CHECK(s[3] == 12);
  const double mean[4] = {3, 4, 5, 6};
  double m[16];
  t.cross_moments4(rows.data(), 2, mean, m);
  for (double x : m) CHECK(x == 8);  // each centered row is ±(2,2,2,2)
  const double id[16] = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  std::vector<double> out(8);
  t.affine4(rows.data(), 2, mean, id, out.data());
  CHECK(out[0] == -2);
  CHECK(out[7] == 2);
}

TEST_CASE("span helpers use the active table") {
  std::vector<double> x{1, 2, 3, 4, 10};
  CHECK(kernels::sum(x) == 20);
  CHECK(kernels::mean(x) == 4);
  CHECK(kernels::centered_dot(x, 4, x, 4) == doctest::Approx(50));
}

}
