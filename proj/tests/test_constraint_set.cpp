#include <doctest.h>

#include <cmath>
#include <random>

#include "lsep/error.hpp"
#include "lsep/model/constraint_set.hpp"

using namespace lsep;

TEST_SUITE("model") {
  TEST_CASE("parse and print round trip") {
    CHECK(ConstraintSet::parse("none").kind() == SetKind::Unconstrained);
    CHECK(ConstraintSet::parse("disk:0.5").power() == 0.5);
    CHECK(ConstraintSet::parse("circle:2").kind() == SetKind::Circle);
    const auto psk = ConstraintSet::parse("psk:8");
    CHECK(psk.order() == 8);
    CHECK(psk.power() == 1.0);
    CHECK(ConstraintSet::parse("psk:4:2").power() == 2.0);
    for (const char* s : {"none", "disk:0.5", "circle:2", "psk:8:1", "psk:2:3"})
      CHECK(ConstraintSet::parse(ConstraintSet::parse(s).to_string()).to_string() == ConstraintSet::parse(s).to_string());
  }

  TEST_CASE("invalid set descriptions are rejected") {
    for (const char* s : {"", "disk", "disk:-1", "disk:0", "circle:nan", "psk:1", "psk:x", "ring:1", "psk:4:-1"})
      CHECK_THROWS_AS(ConstraintSet::parse(s), InvalidArgument);
  }

  TEST_CASE("unit roots are exact at quadrant points") {
    const auto s = ConstraintSet::mpsk(4);
    CHECK(s.root_cos()[0] == 1.0);
    CHECK(s.root_cos()[1] == 0.0);
    CHECK(s.root_cos()[2] == -1.0);
    CHECK(s.root_sin()[3] == -1.0);
    CHECK(ConstraintSet::mpsk(2).root_sin()[1] == 0.0);
  }

  TEST_CASE("scalar minimizer beats every sampled feasible point") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const ConstraintSet sets[] = {ConstraintSet::disk(0.7), ConstraintSet::circle(1.3), ConstraintSet::mpsk(2),
                                  ConstraintSet::mpsk(8, 0.5), ConstraintSet::mpsk(32)};
    for (const auto& set : sets) {
      for (int t = 0; t < 300; ++t) {
        const Complex z(2.0 * nd(rng), 2.0 * nd(rng));
        const double c = 0.1 + 3.0 * ud(rng);
        const Complex x = scalar_constrained_min(set, z, c);
        REQUIRE(set.contains(x, 1e-12));
        const double best = std::abs(z - c * x);
        for (int k = 0; k < 64; ++k) {
          Complex cand;
          const double ph = 2.0 * kPi * ud(rng);
          if (set.kind() == SetKind::Disk)
            cand = std::polar(set.amplitude() * std::sqrt(ud(rng)), ph);
          else if (set.kind() == SetKind::Circle)
            cand = std::polar(set.amplitude(), ph);
          else
            cand = set.point(k % set.order());
          CHECK(best <= std::abs(z - c * cand) + 1e-12);
        }
      }
    }
  }

  TEST_CASE("unconstrained minimizer is z / c") {
    const auto x = scalar_constrained_min(ConstraintSet::unconstrained(), Complex(3.0, -1.5), 2.0);
    CHECK(x.real() == doctest::Approx(1.5));
    CHECK(x.imag() == doctest::Approx(-0.75));
  }

  TEST_CASE("ties resolve to the smallest phase") {
    const auto s4 = ConstraintSet::mpsk(4);
    CHECK(mpsk_nearest_index(s4, Complex(0.0, 0.0)) == 0);
    CHECK(mpsk_nearest_index(s4, Complex(1.0, 1.0)) == 0);
    CHECK(mpsk_nearest_index(s4, Complex(-1.0, 1.0)) == 1);
    CHECK(mpsk_nearest_index(ConstraintSet::mpsk(2), Complex(0.0, 1.0)) == 0);
    const auto circ = ConstraintSet::circle(4.0);
    const Complex x = scalar_constrained_min(circ, Complex(0.0, 0.0), 1.0);
    CHECK(x.real() == 2.0);
    CHECK(x.imag() == 0.0);
    CHECK(scalar_constrained_min(ConstraintSet::disk(1.0), Complex(0.0, 0.0), 1.0) == Complex(0.0, 0.0));
  }

  TEST_CASE("projection is idempotent") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (const auto& set : {ConstraintSet::disk(0.5), ConstraintSet::circle(2.0), ConstraintSet::mpsk(8)}) {
      for (int t = 0; t < 100; ++t) {
        const Complex p = project(set, Complex(nd(rng), nd(rng)));
        const Complex pp = project(set, p);
        CHECK(std::abs(p - pp) <= 1e-12);
      }
    }
  }
}
