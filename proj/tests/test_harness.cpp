#include <doctest.h>

#include <cmath>

#include "lsep/error.hpp"
#include "lsep/harness/harness.hpp"
#include "lsep/harness/ofdm.hpp"
#include "lsep/harness/rate.hpp"
#include "lsep/model/rng.hpp"
#include "lsep/replica/rs.hpp"
#include "test_util.hpp"

using namespace lsep;
using lsep::test::params;

TEST_SUITE("harness") {
  TEST_CASE("trial seeds are stable and distinct") {
    CHECK(trial_seed(5, 3) == trial_seed(5, 3));
    CHECK(trial_seed(5, 3) != trial_seed(5, 4));
    CHECK(trial_seed(5, 3) != trial_seed(6, 3));
  }

  TEST_CASE("empirical distortion does not depend on the thread count") {
    const auto ens = ChannelEnsemble::iid(20, 40);
    const auto p = params(1.0, 0.05);
    const auto a = empirical_distortion(ConstraintSet::disk(1.0), ens, p, 9, 77, {}, 1);
    const auto b = empirical_distortion(ConstraintSet::disk(1.0), ens, p, 9, 77, {}, 3);
    CHECK(a.samples == b.samples);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(a.trials == 9);
    const auto c = empirical_distortion(ConstraintSet::disk(1.0), ens, p, 9, 78, {}, 1);
    CHECK(c.mean != a.mean);
  }

  TEST_CASE("every solver sees the same instance for a trial index") {
    const auto ens = ChannelEnsemble::iid(6, 12);
    std::vector<double> seen_a(4), seen_b(4);
    auto probe = [](std::vector<double>& out) {
      return PrecodeFn([&out](const CMatrix& H, const CVector& u, const SystemParams& p, std::uint64_t seed) {
        for (int t = 0; t < 4; ++t)
          if (seed == trial_seed(3, t)) out[t] = H.norm() + u.norm();
        return rzf_precode(H, u, p);
      });
    };
    empirical_distortion(probe(seen_a), ens, params(1.0, 0.1), 4, 3, 1);
    empirical_distortion(probe(seen_b), ens, params(2.0, 0.5), 4, 3, 1);
    CHECK(seen_a == seen_b);
  }

  TEST_CASE("empirical RZF distortion is near the RS prediction") {
    const auto p = params(1.0, 0.01);
    const auto e = empirical_distortion(ConstraintSet::unconstrained(), ChannelEnsemble::iid(100, 200), p, 10, 1);
    const auto rs = rs_solve(ConstraintSet::unconstrained(), ChannelEnsemble::iid_load(2.0), p).best();
    CHECK(std::abs(to_db(e.mean) - to_db(rs.distortion)) < 1.0);
    CHECK(e.stderr_ > 0.0);
    CHECK(e.nonconverged == 0);
  }

  TEST_CASE("constraining never beats the unconstrained precoder on matched seeds") {
    const auto ens = ChannelEnsemble::iid(20, 40);
    const auto p = params(1.0, 0.01);
    const auto unc = empirical_distortion(ConstraintSet::unconstrained(), ens, p, 12, 21);
    for (double P : {0.2, 1.0}) {
      const auto disk = empirical_distortion(ConstraintSet::disk(P), ens, p, 12, 21);
      CHECK(disk.mean >= unc.mean - 2.0 * unc.stderr_);
    }
  }

  TEST_CASE("harness argument validation") {
    CHECK_THROWS_AS(empirical_distortion(ConstraintSet::disk(1.0), ChannelEnsemble::iid(4, 8), params(), 0, 1),
                    InvalidArgument);
    CHECK_THROWS_AS(empirical_distortion(ConstraintSet::disk(1.0), ChannelEnsemble::iid_load(2.0), params(), 3, 1),
                    InvalidArgument);
  }

  TEST_CASE("rate bound monotonicity") {
    SystemParams p = params();
    p.sigma_n2 = 0.5;
    double prev = std::numeric_limits<double>::infinity();
    for (double D : {0.0, 0.01, 0.1, 1.0, 10.0}) {
      const double r = rate_lower_bound(D, p);
      CHECK(r < prev);
      prev = r;
    }
    prev = -1.0;
    for (double g : {0.1, 1.0, 10.0}) {
      p.gamma = g;
      const double r = rate_lower_bound(0.2, p);
      CHECK(r > prev);
      prev = r;
    }
    p.gamma = 1.0;
    CHECK(rate_lower_bound(1.0, p) == doctest::Approx(std::log2(1.0 + 1.0 / 1.5)));
    CHECK_THROWS_AS(rate_lower_bound(-0.1, p), InvalidArgument);
    CHECK(peak_from_papr(0.5, 3.0) == doctest::Approx(0.5 * std::pow(10.0, 0.3)));
  }

  TEST_CASE("gamma optimizer finds the interior maximum") {
    SystemParams p = params();
    p.sigma_n2 = 1.0;
    // rate = log2(1 + g / (1 + 0.01 g^2)) peaks at g = 10.
    const auto opt = optimize_gamma([](double g) { return 0.01 * g * g; }, p, 0.01, 1000.0);
    CHECK(opt.gamma == doctest::Approx(10.0).epsilon(1e-4));
    SystemParams q = p;
    for (double g : {0.01, 1000.0}) {
      q.gamma = g;
      CHECK(opt.rate >= rate_lower_bound(0.01 * g * g, q));
    }
    CHECK(opt.evaluations > 2);
    // Monotone objective: the optimum sits on the bracket edge.
    const auto edge = optimize_gamma([](double) { return 0.0; }, p, 0.1, 5.0);
    CHECK(edge.gamma == doctest::Approx(5.0));
    CHECK_THROWS_AS(optimize_gamma([](double) { return 0.0; }, p, 2.0, 1.0), InvalidArgument);
  }

  TEST_CASE("OFDM stacking, dimensions and unitarity") {
    const int K = 3, N = 5, L = 4;
    std::vector<CMatrix> Hs;
    for (int k = 0; k < L; ++k) Hs.push_back(sample_channel(ChannelEnsemble::iid(K, N), 100 + k));
    const CMatrix Ht = ofdm_stacked_channel(Hs);
    CHECK(Ht.rows() == K * L);
    CHECK(Ht.cols() == N * L);
    CHECK(Ht(2 * K + 1, 3 * L + 2) == Hs[2](1, 3));
    CHECK(Ht(0, 1) == Complex(0.0, 0.0));
    const CMatrix E = ofdm_equivalent_channel(Hs);
    CHECK(E.rows() == K * L);
    CHECK(E.cols() == N * L);
    for (int l : {1, 7, 32, 64}) CHECK(ofdm_unitarity_residual(l) <= 1e-10);

    // Blockwise eigenvalues equal the dense eigenvalues of E^H E.
    std::vector<double> dense = gram_eigenvalues(E);
    std::vector<double> blocks = ofdm_gram_eigenvalues(E, L);
    REQUIRE(dense.size() == blocks.size());
    for (std::size_t i = 0; i < dense.size(); ++i) CHECK(std::abs(dense[i] - blocks[i]) < 1e-10);
    CHECK_THROWS_AS(ofdm_stacked_channel({}), InvalidArgument);
    CHECK_THROWS_AS(ofdm_gram_eigenvalues(E, 3), InvalidArgument);
  }

  TEST_CASE("KS distance") {
    CHECK(eigen_cdf_compare({1, 2, 3}, {3, 2, 1}) == 0.0);
    CHECK(eigen_cdf_compare({1, 2}, {3, 4}) == 1.0);
    CHECK(eigen_cdf_compare({1, 2, 3, 4}, {1, 2}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(eigen_cdf_compare({}, {1.0}), InvalidArgument);
    // Two independent draws at K = N = 100: finite-size fluctuation only.
    const auto a = gram_eigenvalues(sample_channel(ChannelEnsemble::iid(100, 100), 1));
    const auto b = gram_eigenvalues(sample_channel(ChannelEnsemble::iid(100, 100), 2));
    CHECK(eigen_cdf_compare(a, b) <= 0.15);
  }
}
