#include "lsep/harness/rate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include <boost/math/tools/minima.hpp>

#include "lsep/error.hpp"
#include "lsep/model/spectrum.hpp"

namespace lsep {

double rate_lower_bound(double D, const SystemParams& params) {
  if (!(D >= 0.0)) throw InvalidArgument("rate_lower_bound: distortion must be >= 0");
  const double den = params.sigma_n2 + D;
  const double sig = params.signal_power();
  if (den == 0.0) return sig > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return std::log2(1.0 + sig / den);
}

GammaOptimum optimize_gamma(const std::function<double(double)>& predict, const SystemParams& params,
                            double gamma_lo, double gamma_hi) {
  if (!(gamma_lo > 0.0) || !(gamma_hi > gamma_lo)) throw InvalidArgument("optimize_gamma: need 0 < lo < hi");
  GammaOptimum best;
  best.rate = -std::numeric_limits<double>::infinity();
  int evals = 0;
  auto eval = [&](double g) {
    SystemParams p = params;
    p.gamma = g;
    const double D = predict(g);
    ++evals;
    const double r = rate_lower_bound(D, p);
    if (r > best.rate) {
      best.rate = r;
      best.gamma = g;
      best.distortion = D;
    }
    return r;
  };
  // 2^-14 absolute in log(gamma) is below the 1e-4 relative target.
  std::uintmax_t iters = 200;
  boost::math::tools::brent_find_minima([&](double lg) { return -eval(std::exp(lg)); }, std::log(gamma_lo),
                                        std::log(gamma_hi), 16, iters);
  // Brent may stop at an interior local maximum; the endpoints are checked explicitly.
  eval(gamma_lo);
  eval(gamma_hi);
  best.evaluations = evals;
  return best;
}

namespace {

// Shared bisection on lambda. `solve` returns nullopt when lambda is outside
// the valid region; q(lambda) is decreasing.
template <class Solve>
RSSolution bisect_lambda(Solve&& solve, double lambda_floor, double q_target, double tol) {
  if (!(q_target > 0.0)) throw InvalidArgument("pin_average_power: q_target must be > 0");
  auto too_small = [&](const std::optional<RSSolution>& s) { return !s || s->q > q_target; };

  double hi = std::max(1.0, lambda_floor + 1.0);
  std::optional<RSSolution> shi = solve(hi);
  for (int k = 0; k < 60 && too_small(shi); ++k) {
    hi *= 2.0;
    shi = solve(hi);
  }
  if (too_small(shi)) throw ConvergenceError("pin_average_power: no lambda brings q below the target");

  double lo = std::min(0.0, hi);
  std::optional<RSSolution> slo = solve(lo);
  for (int k = 1; k < 60 && !too_small(slo); ++k) {
    // Approach the floor geometrically from above.
    lo = lambda_floor * (1.0 - std::ldexp(1.0, -k));
    slo = solve(lo);
  }
  if (!too_small(slo)) throw ConvergenceError("pin_average_power: no lambda brings q above the target");

  RSSolution best = *shi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const std::optional<RSSolution> sm = solve(mid);
    if (too_small(sm)) {
      lo = mid;
    } else {
      hi = mid;
      best = *sm;
    }
    if (sm && std::abs(sm->q - q_target) <= tol * q_target) {
      best = *sm;
      break;
    }
    if (hi - lo <= tol * std::max(1.0, std::abs(hi))) break;
  }
  return best;
}

}  // namespace

RSSolution pin_average_power(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                             double q_target, const RsOptions& opts, double tol) {
  if (set.constant_modulus()) {
    if (std::abs(set.power() - q_target) > 1e-12 * q_target)
      throw DomainError("pin_average_power: constant-modulus sets fix q at P");
    return rs_solve(set, ens, params, opts).best();
  }
  if (set.bounded() && q_target > set.power()) throw DomainError("pin_average_power: q_target exceeds P");
  std::optional<std::pair<double, double>> warm;
  auto solve = [&](double lam) -> std::optional<RSSolution> {
    SystemParams p = params;
    p.lambda = lam;
    RsOptions o = opts;
    if (warm) o.inits = {*warm};
    try {
      RSSolution s = rs_solve(set, ens, p, o).best();
      if (!s.converged || !std::isfinite(s.chi)) return std::nullopt;
      s.lambda = lam;
      warm = std::make_pair(s.q, s.chi);
      return s;
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  return bisect_lambda(solve, -r_transform(ens, 0.0), q_target, tol);
}

RSSolution pin_average_power_peak(const ChannelEnsemble& ens, const SystemParams& params, double P, double q_target,
                                  const RsOptions& opts, double tol) {
  if (q_target > P) throw DomainError("pin_average_power_peak: q_target exceeds P");
  auto solve = [&](double lam) -> std::optional<RSSolution> {
    SystemParams p = params;
    p.lambda = lam;
    RSSolution s = rs_peak_power(ens, p, P, opts);
    if (!s.converged || !std::isfinite(s.chi)) return std::nullopt;
    return s;
  };
  return bisect_lambda(solve, -r_transform(ens, 0.0), q_target, tol);
}

}  // namespace lsep
