#include "lsep/replica/rsb1.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "lsep/error.hpp"
#include "lsep/kernels/kernels.hpp"
#include "lsep/model/spectrum.hpp"
#include "lsep/replica/rs.hpp"

namespace lsep {
namespace {

struct Coeffs {
  double eta, Rc, Re, Rpe, e, f, g2;
};

Coeffs coeffs(const ChannelEnsemble& ens, const SystemParams& params, double q, double p, double chi, double mu) {
  Coeffs c{};
  const double s = params.signal_power();
  c.eta = chi + mu * p;
  c.Rc = r_transform(ens, -chi);
  c.Re = r_transform(ens, -c.eta);
  c.Rpe = r_transform_derivative(ens, -c.eta);
  c.e = c.Rc + params.lambda;
  const double f2 = s * c.Re + (q - s * c.eta) * c.Rpe;
  if (!(f2 > 0.0)) throw DomainError("1-RSB: negative radicand in f1");
  if (!(c.e > 0.0)) throw DomainError("1-RSB: e1 must be positive");
  c.f = std::sqrt(f2);
  c.g2 = (c.Rc - c.Re) / mu;
  return c;
}

// log(erfc(x) / 2), finite for all x.
double log_half_erfc(double x) {
  if (x < 26.0) return std::log(0.5 * std::erfc(x));
  const double r = 1.0 / (2.0 * x * x);
  const double series = 1.0 - r + 3.0 * r * r - 15.0 * r * r * r + 105.0 * r * r * r * r;
  return -x * x - std::log(2.0 * x * std::sqrt(kPi)) + std::log(series);
}

// exp(-x^2) / erfc(x); for a truncated N(m, 1/2) above c, E = m + mills(c - m) / sqrt(pi).
double mills(double x) {
  if (x < 26.0) return std::exp(-x * x) / std::erfc(x);
  const double r = 1.0 / (2.0 * x * x);
  return x * std::sqrt(kPi) / (1.0 - r + 3.0 * r * r - 15.0 * r * r * r + 105.0 * r * r * r * r);
}

struct BpskPoint {
  double log_z, mean_x, mean_y;
};

// Real parts z, y ~ N(0, 1/2); x = a sign(w) with w = u + g y, u = f z.
// m = e a^2 - 2 a |w|, so each sign branch is a Gaussian tilted by exp(+-2 mu a g y).
BpskPoint bpsk_point(double amp, double u, double g, double e, double mu) {
  const double base = -mu * e * amp * amp;
  if (!(g > 0.0)) return {base + 2.0 * mu * amp * std::abs(u), u >= 0.0 ? amp : -amp, 0.0};
  const double t = 2.0 * mu * amp * g;
  const double ystar = -u / g;
  const double xp = ystar - 0.5 * t, xm = -ystar - 0.5 * t;
  const double lp = 2.0 * mu * amp * u + 0.25 * t * t + log_half_erfc(xp);
  const double lm = -2.0 * mu * amp * u + 0.25 * t * t + log_half_erfc(xm);
  const double top = std::max(lp, lm);
  const double wp = std::exp(lp - top), wm = std::exp(lm - top);
  const double pp = wp / (wp + wm), pm = wm / (wp + wm);
  const double ep = 0.5 * t + mills(xp) / std::sqrt(kPi);
  const double em = -0.5 * t - mills(xm) / std::sqrt(kPi);
  return {base + top + std::log(wp + wm), amp * (pp - pm), amp * (pp * ep - pm * em)};
}

RsbMoments bpsk_moments(double amp, double f, double g, double e, double mu) {
  constexpr double kZmax = 9.0;
  constexpr int kNodes = 20;
  // The sign change of the tilted mean sits within |z| <= (mu a g^2 + 6 g) / f.
  const double half = std::min(kZmax, (mu * amp * g * g + 6.0 * g) / f);
  const double scale = std::max(g / f, 1e-12);
  const int centre_panels = half > 0.0 ? std::clamp(static_cast<int>(std::ceil(half / scale)), 2, 256) : 0;
  std::vector<double> breaks;
  if (half < kZmax) {
    for (int k = 0; k < 4; ++k) breaks.push_back(-kZmax + (kZmax - half) * k / 4.0);
  }
  for (int k = 0; k <= centre_panels; ++k) breaks.push_back(-half + 2.0 * half * k / std::max(centre_panels, 1));
  if (half < kZmax) {
    for (int k = 1; k <= 4; ++k) breaks.push_back(half + (kZmax - half) * k / 4.0);
  }
  if (centre_panels == 0) breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  RsbMoments out;
  out.B = amp * amp;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    if (!(breaks[p + 1] > breaks[p])) continue;
    const GaussRule gl = gauss_legendre(kNodes, breaks[p], breaks[p + 1]);
    for (int i = 0; i < kNodes; ++i) {
      const double z = gl.x[i];
      const double w = gl.w[i] * std::exp(-z * z) / std::sqrt(kPi);
      const BpskPoint pt = bpsk_point(amp, f * z, g, e, mu);
      out.A += w * z * pt.mean_x;
      out.C += w * pt.mean_y;
      out.log_z += w * pt.log_z;
    }
  }
  return out;
}

double gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

void fill(RSBSolution& sol, const ChannelEnsemble& ens, const SystemParams& params) {
  const Coeffs c = coeffs(ens, params, sol.q1, sol.p1, sol.chi1, sol.mu1);
  sol.eta1 = c.eta;
  sol.f1 = c.f;
  sol.g1 = std::sqrt(std::max(c.g2, 0.0));
  sol.e1 = c.e;
  sol.distortion = rsb1_distortion(sol, ens, params);
  sol.dbreve = sol.distortion + params.lambda * ens.alpha * (sol.q1 + sol.p1);
}

struct Step {
  double q, p, chi;
};

Step inner_map(const ConstraintSet& set, const RsbRules& rules, const Coeffs& c, double mu) {
  const double g = std::sqrt(c.g2);
  const RsbMoments m = rsb1_moments(set, rules, c.f, g, c.e, mu);
  const double eta = m.A / c.f;
  const double q = (m.C / g - eta) / mu;
  const double p = m.B - q;
  return {q, p, eta - mu * p};
}

}  // namespace

RsbRules rsb1_rules(const ConstraintSet& set, int nodes) {
  if (set.kind() == SetKind::MPSK && set.order() == 2) return {{}, {}, true};
  return {complex_gauss_hermite(nodes), complex_gauss_hermite(nodes), false};
}

RsbMoments rsb1_moments(const ConstraintSet& set, const RsbRules& rules, double f, double g, double e, double mu) {
  if (rules.bpsk) return bpsk_moments(std::sqrt(set.power()), f, g, e, mu);
  const auto view = kernels::view_of(set);
  const auto isa = kernels::active_isa();
  const std::size_t ny = rules.y.size();
  std::vector<double> scratch(ny);
  RsbMoments out;
  for (std::size_t i = 0; i < rules.z.size(); ++i) {
    const double zr = rules.z.re[i], zi = rules.z.im[i], wz = rules.z.w[i];
    const auto row = kernels::rsb_row(view, Complex(f * zr, f * zi), g, e, mu, rules.y.re.data(), rules.y.im.data(),
                                      rules.y.w.data(), ny, scratch.data(), isa);
    out.A += wz * (zr * row.mean_x.real() + zi * row.mean_x.imag());
    out.B += wz * row.mean_p;
    out.C += wz * row.mean_y;
    out.log_z += wz * row.log_z;
  }
  return out;
}

RSBSolution rsb1_inner(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                       const RsbRules& rules, double mu, double q1, double p1, double chi1, const RsbOptions& opts) {
  RSBSolution sol;
  sol.mu1 = mu;
  double q = q1, p = p1, chi = chi1, theta = opts.damping;
  double prev = std::numeric_limits<double>::infinity();
  Step good{q, p, chi}, good_next{q, p, chi};
  bool have_good = false;
  for (int it = 0; it < opts.max_inner; ++it) {
    sol.iterations = it + 1;
    if (p <= opts.p_floor) {
      sol.note = "collapsed to p1 = 0";
      sol.q1 = q;
      sol.p1 = 0.0;
      sol.chi1 = chi;
      sol.reduced_to_rs = true;
      return sol;
    }
    Step next;
    try {
      const Coeffs c = coeffs(ens, params, q, p, chi, mu);
      if (!(c.g2 > 0.0)) throw DomainError("1-RSB: negative radicand in g1");
      next = inner_map(set, rules, c, mu);
      if (!std::isfinite(next.q) || !std::isfinite(next.p) || !std::isfinite(next.chi))
        throw DomainError("1-RSB: non-finite update");
    } catch (const DomainError& err) {
      if (!have_good || theta < 1e-6) {
        sol.note = err.what();
        return sol;
      }
      theta *= 0.5;
      q = good.q + theta * (good_next.q - good.q);
      p = good.p + theta * (good_next.p - good.p);
      chi = good.chi + theta * (good_next.chi - good.chi);
      continue;
    }
    have_good = true;
    good = {q, p, chi};
    good_next = next;
    const double res = std::max({gap(next.q, q), gap(next.p, p), gap(next.chi, chi)});
    sol.residual = res;
    if (res < opts.tol) {
      sol.q1 = next.q;
      sol.p1 = next.p;
      sol.chi1 = next.chi;
      sol.converged = next.p > opts.p_floor && next.chi >= 0.0;
      if (!sol.converged) {
        sol.reduced_to_rs = true;
        sol.note = "collapsed to p1 = 0";
      }
      return sol;
    }
    if (res > prev) theta = std::max(theta * 0.5, opts.damping / 64.0);
    prev = res;
    q += theta * (next.q - q);
    p = std::max(0.0, p + theta * (next.p - p));
    chi = std::max(0.0, chi + theta * (next.chi - chi));
  }
  sol.q1 = q;
  sol.p1 = p;
  sol.chi1 = chi;
  sol.note = "inner iteration hit the iteration limit";
  return sol;
}

double rsb1_mu_residual(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                        const RsbRules& rules, const RSBSolution& st) {
  const double s = params.signal_power(), mu = st.mu1, q = st.q1, p = st.p1, chi = st.chi1;
  const Coeffs c = coeffs(ens, params, q, p, chi, mu);
  const RsbMoments m = rsb1_moments(set, rules, c.f, std::sqrt(std::max(c.g2, 0.0)), c.e, mu);
  const double eta = c.eta;
  const double rhs = m.log_z - 2.0 * chi * c.Rc + (mu * q + 2.0 * eta - 2.0 * mu * eta * s) * c.Re -
                     2.0 * mu * eta * (q - s * eta) * c.Rpe + params.lambda * mu * (p + q);
  return rhs - r_transform_integral(ens, chi, eta);
}

double rsb1_residual(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                     const RSBSolution& sol, const RsbOptions& opts) {
  const RsbRules rules = rsb1_rules(set, opts.nodes);
  const Coeffs c = coeffs(ens, params, sol.q1, sol.p1, sol.chi1, sol.mu1);
  if (!(c.g2 > 0.0)) throw DomainError("rsb1_residual: g1 must be positive");
  const Step next = inner_map(set, rules, c, sol.mu1);
  const double phi = rsb1_mu_residual(set, ens, params, rules, sol);
  return std::max({std::abs(next.q - sol.q1), std::abs(next.p - sol.p1), std::abs(next.chi - sol.chi1),
                   std::abs(phi)});
}

double rsb1_distortion(const RSBSolution& sol, const ChannelEnsemble& ens, const SystemParams& params) {
  if (!(sol.mu1 > 0.0)) throw DomainError("rsb1_distortion: mu1 must be > 0");
  const double s = params.signal_power(), a = ens.alpha;
  const double chi = sol.chi1, q = sol.q1, mu = sol.mu1;
  const double eta = chi + mu * sol.p1;
  const double Rc = r_transform(ens, -chi), Re = r_transform(ens, -eta), Rpe = r_transform_derivative(ens, -eta);
  return s - (a * chi / mu) * Rc + a * (q + eta / mu - 2.0 * s * eta) * Re - a * eta * (q - s * eta) * Rpe;
}

RsbResult rsb1_solve(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                     const RsbOptions& opts) {
  ens.validate();
  params.validate_strict();
  if (!set.bounded()) throw InvalidArgument("rsb1_solve: the unconstrained set is handled by the RS solver");
  if (!(opts.mu_lo > 0.0) || !(opts.mu_hi > opts.mu_lo) || opts.mu_grid < 2)
    throw InvalidArgument("rsb1_solve: invalid mu1 search bracket");
  const RsbRules rules = rsb1_rules(set, opts.nodes);
  std::ostringstream diag;
  diag.precision(6);

  RsbResult out;
  // The replica-symmetric point, on a quadrature matching the 1-RSB integrals.
  RsOptions rso;
  rso.quadrature = rules.bpsk ? RsQuadrature::Polar : RsQuadrature::GaussHermite;
  rso.nodes = opts.nodes;
  rso.tol = opts.tol;
  double q_rs = 1.0;
  try {
    const RSSolution rs = rs_solve(set, ens, params, rso).best();
    RSBSolution cand;
    cand.q1 = rs.q;
    cand.chi1 = rs.chi;
    cand.eta1 = rs.chi;
    cand.f1 = rs.f;
    cand.e1 = rs.e;
    cand.distortion = rs.distortion;
    cand.dbreve = rs.dbreve;
    cand.converged = true;
    cand.reduced_to_rs = true;
    cand.residual = rs.residual;
    cand.iterations = rs.iterations;
    cand.note = "replica-symmetric point";
    out.solutions.push_back(cand);
    q_rs = rs.q;
  } catch (const Error& err) {
    diag << "RS point unavailable: " << err.what() << "; ";
  }

  // Scan mu1 with warm starts.
  struct Sample {
    double mu;
    RSBSolution st;
    double phi;
  };
  std::vector<Sample> samples;
  const Step cold{0.6 * q_rs, 0.4 * q_rs, 0.1};
  Step warm = cold;
  const double la = std::log(opts.mu_lo), lb = std::log(opts.mu_hi);
  for (int k = 0; k < opts.mu_grid; ++k) {
    const double mu = std::exp(la + (lb - la) * k / (opts.mu_grid - 1));
    RSBSolution st = rsb1_inner(set, ens, params, rules, mu, warm.q, warm.p, warm.chi, opts);
    if (!st.converged) {
      warm = cold;
      continue;
    }
    warm = {st.q1, st.p1, st.chi1};
    double phi;
    try {
      phi = rsb1_mu_residual(set, ens, params, rules, st);
    } catch (const DomainError&) {
      continue;
    }
    samples.push_back({mu, st, phi});
  }
  diag << "mu1 scan: " << samples.size() << " of " << opts.mu_grid << " grid points with p1 > 0; ";

  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const Sample& lo = samples[k];
    const Sample& hi = samples[k + 1];
    if (!(lo.phi * hi.phi < 0.0)) continue;
    RSBSolution last = lo.st;
    auto phi_of = [&](double logmu) {
      const double mu = std::exp(logmu);
      RSBSolution st = rsb1_inner(set, ens, params, rules, mu, lo.st.q1, lo.st.p1, lo.st.chi1, opts);
      if (!st.converged) throw ConvergenceError("inner solve failed during mu1 refinement");
      last = st;
      return rsb1_mu_residual(set, ens, params, rules, st);
    };
    try {
      std::uintmax_t iters = 100;
      const auto root = boost::math::tools::toms748_solve(phi_of, std::log(lo.mu), std::log(hi.mu), lo.phi, hi.phi,
                                                          boost::math::tools::eps_tolerance<double>(48), iters);
      const double mu = std::exp(0.5 * (root.first + root.second));
      RSBSolution st = rsb1_inner(set, ens, params, rules, mu, lo.st.q1, lo.st.p1, lo.st.chi1, opts);
      if (!st.converged) continue;
      const double phi = rsb1_mu_residual(set, ens, params, rules, st);
      fill(st, ens, params);
      st.residual = std::max(st.residual, std::abs(phi));
      st.note = "1-RSB point";
      out.solutions.push_back(st);
    } catch (const Error& err) {
      diag << "refinement in [" << lo.mu << ", " << hi.mu << "] failed: " << err.what() << "; ";
    }
  }

  if (out.solutions.empty()) throw ConvergenceError("rsb1_solve: no solution found (" + diag.str() + ")");

  // Default rule: prefer p1 > 0; among those, the largest dbreve.
  std::size_t pick = 0, argmax = 0;
  bool have_rsb = false;
  for (std::size_t i = 0; i < out.solutions.size(); ++i) {
    const auto& s = out.solutions[i];
    if (s.dbreve > out.solutions[argmax].dbreve) argmax = i;
    if (!s.reduced_to_rs && (!have_rsb || s.dbreve > out.solutions[pick].dbreve)) {
      pick = i;
      have_rsb = true;
    }
  }
  out.selected = have_rsb ? pick : argmax;
  out.max_dbreve_agrees = out.selected == argmax;
  diag << out.solutions.size() << " candidate(s); selected " << (have_rsb ? "p1 > 0" : "replica-symmetric")
       << " point; largest dbreve " << (out.max_dbreve_agrees ? "agrees" : "differs");
  out.diagnostics = diag.str();
  return out;
}

}  // namespace lsep
