#include "lsep/replica/rs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lsep/error.hpp"
#include "lsep/kernels/kernels.hpp"
#include "lsep/model/spectrum.hpp"
#include "lsep/replica/quadrature.hpp"

namespace lsep {
namespace {

struct Scales {
  double f;
  double e;
};

Scales scales(const ChannelEnsemble& ens, const SystemParams& params, double q, double chi) {
  const double s = params.signal_power();
  const double R = r_transform(ens, -chi);
  const double Rp = r_transform_derivative(ens, -chi);
  const double f2 = (q - chi * s) * Rp + s * R;
  if (!(f2 > 0.0)) throw DomainError("RS: negative radicand in f");
  return {std::sqrt(f2), R + params.lambda};
}

QuadratureRule rule_for(const ConstraintSet& set, double c, const RsOptions& opts) {
  if (opts.quadrature == RsQuadrature::Polar) return polar_rule(set, c, opts.nodes);
  return complex_gauss_hermite(opts.nodes);
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

void finish(RSSolution& sol, const ChannelEnsemble& ens, const SystemParams& params) {
  const Scales sc = scales(ens, params, sol.q, sol.chi);
  sol.f = sc.f;
  sol.e = sc.e;
  sol.lambda = params.lambda;
  sol.distortion = rs_distortion(sol.q, sol.chi, ens, params);
  sol.dbreve = sol.distortion + params.lambda * ens.alpha * sol.q;
}

RSSolution iterate(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params, double q0,
                   double chi0, const RsOptions& opts) {
  RSSolution sol;
  double q = q0, chi = chi0;
  double theta = opts.damping;
  double prev_res = std::numeric_limits<double>::infinity();
  bool have_good = false;
  double gq = 0, gchi = 0, gmq = 0, gmchi = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    sol.iterations = it + 1;
    std::pair<double, double> next;
    try {
      next = rs_map(set, ens, params, q, chi, opts);
    } catch (const DomainError&) {
      if (!have_good || theta < 1e-6) {
        sol.note = "iteration left the valid region";
        return sol;
      }
      theta *= 0.5;
      q = gq + theta * (gmq - gq);
      chi = gchi + theta * (gmchi - gchi);
      continue;
    }
    have_good = true;
    gq = q;
    gchi = chi;
    gmq = next.first;
    gmchi = next.second;
    const double res = std::max(relative_gap(next.first, q), relative_gap(next.second, chi));
    sol.residual = res;
    if (res < opts.tol) {
      sol.q = next.first;
      sol.chi = next.second;
      sol.converged = true;
      return sol;
    }
    if (res > prev_res) theta = std::max(theta * 0.5, opts.damping / 64.0);
    prev_res = res;
    q = std::max(0.0, q + theta * (next.first - q));
    chi = std::max(0.0, chi + theta * (next.second - chi));
    if (chi > 1e12) {
      sol.note = "chi diverges (distortion tends to zero)";
      sol.q = q;
      sol.chi = chi;
      return sol;
    }
  }
  sol.q = q;
  sol.chi = chi;
  sol.note = "maximum iterations reached";
  return sol;
}

}  // namespace

std::pair<double, double> rs_map(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                                 double q, double chi, const RsOptions& opts) {
  const Scales sc = scales(ens, params, q, chi);
  const double c = sc.e / sc.f;
  if (!(c > 0.0)) throw DomainError("RS: R(-chi) + lambda must be positive");
  const QuadratureRule rule = rule_for(set, c, opts);
  const std::size_t n = rule.size();
  std::vector<double> xr(n), xi(n);
  kernels::constrained_min_batch(kernels::view_of(set), rule.re.data(), rule.im.data(), c, xr.data(), xi.data(), n);
  double qn = 0.0, a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    qn += rule.w[i] * (xr[i] * xr[i] + xi[i] * xi[i]);
    a += rule.w[i] * (rule.re[i] * xr[i] + rule.im[i] * xi[i]);
  }
  return {qn, a / sc.f};
}

double rs_residual(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                   const RSSolution& sol, const RsOptions& opts) {
  const auto [qn, chin] = rs_map(set, ens, params, sol.q, sol.chi, opts);
  return std::max(std::abs(qn - sol.q), std::abs(chin - sol.chi));
}

RsResult rs_solve(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                  const RsOptions& opts) {
  ens.validate();
  params.validate_strict();
  std::vector<std::pair<double, double>> inits = opts.inits;
  if (inits.empty())
    for (double a : {0.1, 1.0, 10.0})
      for (double b : {0.1, 1.0, 10.0}) inits.emplace_back(a, b);

  RsResult out;
  std::string notes;
  for (const auto& [q0, chi0] : inits) {
    RSSolution sol = iterate(set, ens, params, q0, chi0, opts);
    if (!sol.converged) {
      if (notes.find(sol.note) == std::string::npos) notes += notes.empty() ? sol.note : "; " + sol.note;
      continue;
    }
    const bool dup = std::any_of(out.solutions.begin(), out.solutions.end(), [&](const RSSolution& o) {
      return relative_gap(o.q, sol.q) < 1e-6 && relative_gap(o.chi, sol.chi) < 1e-6;
    });
    if (dup) continue;
    finish(sol, ens, params);
    out.solutions.push_back(sol);
  }
  if (out.solutions.empty()) throw ConvergenceError("rs_solve: no fixed point converged (" + notes + ")");
  for (std::size_t i = 1; i < out.solutions.size(); ++i)
    if (out.solutions[i].dbreve > out.solutions[out.selected].dbreve) out.selected = i;
  return out;
}

double rs_distortion(double q, double chi, const ChannelEnsemble& ens, const SystemParams& params) {
  const double s = params.signal_power();
  if (ens.is_iid()) {
    const double R = r_transform(ens, -chi);
    const double Rp = r_transform_derivative(ens, -chi);
    return s + ens.alpha * ((q - 2.0 * s * chi) * R - chi * (q - s * chi) * Rp);
  }
  auto bracket = [&](double x) { return (q - x * s) * x * r_transform(ens, -x); };
  const double h = 1e-6 * std::max(1.0, std::abs(chi));
  return s + ens.alpha * (bracket(chi + h) - bracket(chi - h)) / (2.0 * h);
}

RSSolution rs_psk(int M, const ChannelEnsemble& ens, const SystemParams& params) {
  if (M < 2) throw InvalidArgument("rs_psk: M must be >= 2");
  if (!ens.is_iid()) throw InvalidArgument("rs_psk: closed form requires an iid spectrum");
  params.validate_strict();
  const double s = params.signal_power();
  const double inv = 2.0 / (M * std::sin(kPi / M)) * std::sqrt(kPi * (1.0 + s) / ens.alpha) - 1.0;
  if (!(inv > 0.0)) throw DomainError("rs_psk: 1/chi <= 0, outside the validity region of the closed form");
  RSSolution sol;
  sol.q = 1.0;
  sol.chi = 1.0 / inv;
  sol.converged = true;
  finish(sol, ens, params);
  sol.distortion = (1.0 + s) / ((1.0 + sol.chi) * (1.0 + sol.chi));
  sol.dbreve = sol.distortion + params.lambda * ens.alpha * sol.q;
  return sol;
}

RSSolution rs_constant_envelope(const ChannelEnsemble& ens, const SystemParams& params) {
  if (!ens.is_iid()) throw InvalidArgument("rs_constant_envelope: closed form requires an iid spectrum");
  params.validate_strict();
  const double s = params.signal_power();
  const double inv = 2.0 / kPi * std::sqrt(kPi * (1.0 + s) / ens.alpha) - 1.0;
  if (!(inv > 0.0)) throw DomainError("rs_constant_envelope: 1/chi <= 0, outside the validity region");
  RSSolution sol;
  sol.q = 1.0;
  sol.chi = 1.0 / inv;
  sol.converged = true;
  finish(sol, ens, params);
  sol.distortion = (1.0 + s) / ((1.0 + sol.chi) * (1.0 + sol.chi));
  sol.dbreve = sol.distortion + params.lambda * ens.alpha * sol.q;
  return sol;
}

}  // namespace lsep
