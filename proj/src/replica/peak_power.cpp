#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "lsep/error.hpp"
#include "lsep/model/spectrum.hpp"
#include "lsep/model/special.hpp"
#include "lsep/replica/rs.hpp"

namespace lsep {
namespace {

// h = c (1 - exp(-P/c^2)) + sqrt(P pi) Q(sqrt(2P)/c), written in x = P / c^2.
double h_of(double cp, double P, double x) {
  return cp * (-std::expm1(-x)) + std::sqrt(P * kPi) * gaussian_q(std::sqrt(2.0 * x));
}

void fill_scales(RSSolution& sol, const ChannelEnsemble& ens, const SystemParams& params) {
  const double s = params.signal_power();
  sol.f = std::sqrt((sol.q + s) / ens.alpha) / (1.0 + sol.chi);
  sol.e = r_transform(ens, -sol.chi) + sol.lambda;
  sol.distortion = (sol.q + s) / ((1.0 + sol.chi) * (1.0 + sol.chi));
  sol.dbreve = sol.distortion + sol.lambda * ens.alpha * sol.q;
}

}  // namespace

RSSolution rs_peak_power(const ChannelEnsemble& ens, const SystemParams& params, double P, const RsOptions& opts) {
  if (!ens.is_iid()) throw InvalidArgument("rs_peak_power: closed forms require an iid spectrum");
  params.validate_strict();
  if (!(P > 0.0)) throw InvalidArgument("rs_peak_power: P must be > 0");
  const double a = ens.alpha, s = params.signal_power(), lam = params.lambda;

  RSSolution sol;
  sol.lambda = lam;
  double q = std::min(P, 1.0) / 2.0, chi = 1.0, theta = opts.damping, prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    sol.iterations = it + 1;
    const double den = a * lam * (1.0 + chi) + 1.0;
    if (!(den > 0.0)) {
      sol.note = "alpha lambda (1 + chi) + 1 <= 0";
      return sol;
    }
    const double cp = std::sqrt(a * (q + s)) / den;
    double qn, h;
    if (std::isinf(P)) {
      qn = cp * cp;
      h = cp;
    } else {
      const double x = P / (cp * cp);
      qn = cp * cp * (-std::expm1(-x));
      h = h_of(cp, P, x);
    }
    const double chin = std::sqrt(a / (q + s)) * (1.0 + chi) * h;
    const double res = std::max(std::abs(qn - q) / std::max(1.0, q), std::abs(chin - chi) / std::max(1.0, chi));
    sol.residual = res;
    if (res < opts.tol) {
      sol.q = qn;
      sol.chi = chin;
      sol.converged = true;
      fill_scales(sol, ens, params);
      return sol;
    }
    if (res > prev) theta = std::max(theta * 0.5, opts.damping / 64.0);
    prev = res;
    q += theta * (qn - q);
    chi += theta * (chin - chi);
    if (chi > 1e12) break;
  }
  sol.q = q;
  sol.chi = chi;
  sol.note = chi > 1e12 ? "chi diverges (distortion tends to zero)" : "maximum iterations reached";
  if (chi > 1e12) {
    sol.chi = std::numeric_limits<double>::infinity();
    sol.distortion = 0.0;
  }
  return sol;
}

RSSolution rs_pinned_closed_form(const ChannelEnsemble& ens, const SystemParams& params, double P, double q) {
  if (!ens.is_iid()) throw InvalidArgument("rs_pinned_closed_form: requires an iid spectrum");
  params.validate_strict();
  if (!(q > 0.0)) throw InvalidArgument("rs_pinned_closed_form: q must be > 0");
  if (!(P >= q * (1.0 - 1e-12))) throw DomainError("rs_pinned_closed_form: average power exceeds the peak power");
  const double a = ens.alpha, s = params.signal_power();

  double cp = std::numeric_limits<double>::infinity();
  double h = 0.0;
  bool circle = false;
  if (std::isinf(P)) {
    cp = std::sqrt(q);
    h = cp;
  } else if (P <= q * (1.0 + 1e-12)) {
    circle = true;
    h = std::sqrt(P) * std::sqrt(kPi) / 2.0;
  } else {
    // (1 - exp(-x)) / x = q / P is decreasing in x.
    const double target = q / P;
    auto fn = [&](double x) { return one_minus_exp_over(x) - target; };
    double lo = 1e-300, hi = 1.0;
    while (fn(hi) > 0.0) hi *= 2.0;
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(fn, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    const double x = 0.5 * (root.first + root.second);
    cp = std::sqrt(P / x);
    h = h_of(cp, P, x);
  }

  RSSolution sol;
  sol.q = q;
  sol.converged = true;
  const double t = std::sqrt(a / (q + s)) * h;
  if (t >= 1.0) {
    sol.chi = std::numeric_limits<double>::infinity();
    sol.distortion = 0.0;
    sol.dbreve = 0.0;
    sol.lambda = std::numeric_limits<double>::quiet_NaN();
    sol.note = "beyond the critical load: distortion is zero";
    return sol;
  }
  sol.chi = t / (1.0 - t);
  // The circle is the limit c -> inf, where e = R(-chi) + lambda -> 0.
  sol.lambda = circle ? -r_transform(ens, -sol.chi) : (std::sqrt(a * (q + s)) / cp - 1.0) / (a * (1.0 + sol.chi));
  fill_scales(sol, ens, params);
  if (circle) sol.note = "circle: lambda is the e -> 0 limit";
  return sol;
}

}  // namespace lsep
