#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lsep/model/channel.hpp"
#include "lsep/model/constraint_set.hpp"
#include "lsep/model/params.hpp"

namespace lsep {

/// Replica-symmetric saddle point. f^2 = (q - chi s) R'(-chi) + s R(-chi)
/// with s = gamma sigma_u^2, e = R(-chi) + lambda.
struct RSSolution {
  double q = 0.0;
  double chi = 0.0;
  double f = 0.0;
  double e = 0.0;
  double distortion = 0.0;
  /// distortion + lambda alpha q; the candidate with the largest value is selected.
  double dbreve = 0.0;
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;
  /// lambda used (differs from the input when the average power is pinned).
  double lambda = 0.0;
  std::string note;
};

enum class RsQuadrature { Polar, GaussHermite };

struct RsOptions {
  double tol = 1e-10;
  int max_iter = 10000;
  double damping = 0.5;
  RsQuadrature quadrature = RsQuadrature::Polar;
  int nodes = 40;
  /// Initial (q, chi) pairs; empty selects {0.1, 1, 10}^2.
  std::vector<std::pair<double, double>> inits;
};

struct RsResult {
  std::vector<RSSolution> solutions;
  std::size_t selected = 0;
  const RSSolution& best() const { return solutions.at(selected); }
};

/// Damped fixed-point iteration of the RS equations from every initial pair.
/// Returns the distinct converged fixed points; throws ConvergenceError if none converge.
RsResult rs_solve(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                  const RsOptions& opts = {});

/// D = s + alpha d/dchi[(q - chi s) chi R(-chi)] with q held constant.
double rs_distortion(double q, double chi, const ChannelEnsemble& ens, const SystemParams& params);

/// Right-hand side of the RS equations at (q, chi): returns (q', chi').
std::pair<double, double> rs_map(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                                 double q, double chi, const RsOptions& opts = {});

/// Max-norm residual |map(q, chi) - (q, chi)|, evaluated afresh.
double rs_residual(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                   const RSSolution& sol, const RsOptions& opts = {});

/// Disk closed forms for iid channels: damped iteration of
/// chi = sqrt(alpha / (q + s)) (1 + chi) h and q = c^2 (1 - exp(-P / c^2)).
/// P = +inf drops the peak constraint (q = c^2, h = c).
RSSolution rs_peak_power(const ChannelEnsemble& ens, const SystemParams& params, double P,
                         const RsOptions& opts = {});

/// Closed-form inversion with q pinned: returns the RS point and the lambda that
/// produces it. `P` = +inf means no peak constraint; `P == q` is the circle.
/// Beyond the critical load the distortion is 0 and chi is +inf.
RSSolution rs_pinned_closed_form(const ChannelEnsemble& ens, const SystemParams& params, double P, double q);

/// M-PSK closed form with unit power (q = 1); lambda does not enter.
/// Throws DomainError when 1/chi <= 0.
RSSolution rs_psk(int M, const ChannelEnsemble& ens, const SystemParams& params);

/// Limit M -> infinity of rs_psk (constant envelope, unit power).
RSSolution rs_constant_envelope(const ChannelEnsemble& ens, const SystemParams& params);

}  // namespace lsep
