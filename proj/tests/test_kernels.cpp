#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lsep/kernels/kernels.hpp"
#include "lsep/model/constraint_set.hpp"

using namespace lsep;
using kernels::Isa;

namespace {

std::vector<ConstraintSet> all_sets() {
  return {ConstraintSet::unconstrained(), ConstraintSet::disk(0.8),  ConstraintSet::circle(1.5),
          ConstraintSet::mpsk(2),         ConstraintSet::mpsk(4, 2), ConstraintSet::mpsk(8),
          ConstraintSet::mpsk(16),        ConstraintSet::mpsk(64)};
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar batch matches the reference minimizer exactly") {
    const std::size_t n = 1003;
    const auto zr = gaussian(n, 1, 2.0), zi = gaussian(n, 2, 2.0);
    std::vector<double> xr(n), xi(n);
    for (const auto& set : all_sets()) {
      kernels::constrained_min_batch(kernels::view_of(set), zr.data(), zi.data(), 1.7, xr.data(), xi.data(), n,
                                     Isa::Scalar);
      for (std::size_t i = 0; i < n; ++i) {
        const Complex ref = scalar_constrained_min(set, Complex(zr[i], zi[i]), 1.7);
        CHECK(xr[i] == ref.real());
        CHECK(xi[i] == ref.imag());
      }
    }
  }

  TEST_CASE("AVX2 variants agree with the scalar references") {
    if (!kernels::isa_available(Isa::Avx2)) {
      MESSAGE("AVX2 not available; equivalence checks skipped");
      return;
    }
    const std::size_t n = 1027;
    const auto zr = gaussian(n, 3, 2.0), zi = gaussian(n, 4, 2.0);

    SUBCASE("constrained_min_batch is bit-identical") {
      std::vector<double> ar(n), ai(n), br(n), bi(n);
      for (const auto& set : all_sets()) {
        const auto v = kernels::view_of(set);
        kernels::constrained_min_batch(v, zr.data(), zi.data(), 0.9, ar.data(), ai.data(), n, Isa::Scalar);
        kernels::constrained_min_batch(v, zr.data(), zi.data(), 0.9, br.data(), bi.data(), n, Isa::Avx2);
        for (std::size_t i = 0; i < n; ++i) {
          CHECK(ar[i] == br[i]);
          CHECK(ai[i] == bi[i]);
        }
      }
    }

    SUBCASE("rsb_row agrees to rounding") {
      auto wy = gaussian(n, 5);
      double wsum = 0.0;
      for (auto& w : wy) wsum += (w = std::abs(w));
      for (auto& w : wy) w /= wsum;
      std::vector<double> s1(n), s2(n);
      for (const auto& set : all_sets()) {
        const auto v = kernels::view_of(set);
        for (double mu : {0.1, 3.0, 40.0}) {
          const auto a = kernels::rsb_row(v, Complex(0.7, -0.3), 0.4, 1.3, mu, zr.data(), zi.data(), wy.data(), n,
                                          s1.data(), Isa::Scalar);
          const auto b = kernels::rsb_row(v, Complex(0.7, -0.3), 0.4, 1.3, mu, zr.data(), zi.data(), wy.data(), n,
                                          s2.data(), Isa::Avx2);
          CHECK(b.log_z == doctest::Approx(a.log_z).epsilon(1e-12));
          CHECK(std::abs(b.mean_x - a.mean_x) <= 1e-12 * (1.0 + std::abs(a.mean_x)));
          CHECK(b.mean_p == doctest::Approx(a.mean_p).epsilon(1e-12));
          CHECK(b.mean_y == doctest::Approx(a.mean_y).epsilon(1e-11));
        }
      }
    }

    SUBCASE("complex dot and axpy") {
      std::vector<Complex> a(n), b(n), y1(n), y2(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = Complex(zr[i], zi[i]);
        b[i] = Complex(zi[i], -zr[i] * 0.5);
        y1[i] = y2[i] = Complex(zr[n - 1 - i], 1.0);
      }
      for (std::size_t len : {std::size_t{0}, std::size_t{1}, std::size_t{2}, std::size_t{7}, n}) {
        const Complex r1 = kernels::cdotc(a.data(), b.data(), len, Isa::Scalar);
        const Complex r2 = kernels::cdotc(a.data(), b.data(), len, Isa::Avx2);
        CHECK(std::abs(r1 - r2) <= 1e-12 * (1.0 + std::abs(r1)) * std::sqrt(static_cast<double>(len) + 1.0));
      }
      kernels::caxpy(Complex(0.3, -1.1), a.data(), y1.data(), n, Isa::Scalar);
      kernels::caxpy(Complex(0.3, -1.1), a.data(), y2.data(), n, Isa::Avx2);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (1.0 + std::abs(y1[i])));
    }

    SUBCASE("exp polynomial") {
      std::vector<double> x(2001), e1(x.size()), e2(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = -745.0 + 0.37 * static_cast<double>(i);
      kernels::exp_batch(x.data(), e1.data(), x.size(), Isa::Scalar);
      kernels::exp_batch(x.data(), e2.data(), x.size(), Isa::Avx2);
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < -708.0) {
          CHECK(e2[i] <= 1e-300);
        } else {
          CHECK(e2[i] == doctest::Approx(e1[i]).epsilon(4e-15));
        }
      }
    }
  }

  TEST_CASE("dispatch can be forced and restored") {
    kernels::force_isa(Isa::Scalar);
    CHECK(kernels::active_isa() == Isa::Scalar);
    kernels::force_isa(std::nullopt);
    CHECK(kernels::isa_available(kernels::active_isa()));
    if (!kernels::isa_available(Isa::Avx2)) CHECK_THROWS(kernels::force_isa(Isa::Avx2));
    CHECK(std::string(kernels::isa_name(Isa::Avx2)) == "avx2");
  }
}
