#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "lsep/model/channel.hpp"
#include "lsep/model/constraint_set.hpp"
#include "lsep/model/params.hpp"
#include "lsep/replica/rs.hpp"

namespace lsep {

/// log2(1 + gamma sigma_u^2 / (sigma_n^2 + D)) in bits per channel use.
double rate_lower_bound(double D, const SystemParams& params);

struct GammaOptimum {
  double gamma = 0.0;
  double rate = 0.0;
  double distortion = 0.0;
  int evaluations = 0;
};

/// Maximizes rate_lower_bound(predict(gamma)) over [gamma_lo, gamma_hi] by a
/// golden-section/parabolic search in log(gamma), relative tolerance 1e-4.
/// `predict` returns the distortion at the given gamma.
GammaOptimum optimize_gamma(const std::function<double(double)>& predict, const SystemParams& params,
                            double gamma_lo, double gamma_hi);

/// RS point with lambda tuned so that q equals `q_target`. Bisection on
/// lambda: q decreases as lambda grows, and lambda values that push the
/// iteration out of its valid region count as too small.
RSSolution pin_average_power(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                             double q_target, const RsOptions& opts = {}, double tol = 1e-10);

/// Same, for the iid disk closed forms (rs_peak_power in the inner loop).
/// P = +inf drops the peak constraint.
RSSolution pin_average_power_peak(const ChannelEnsemble& ens, const SystemParams& params, double P, double q_target,
                                  const RsOptions& opts = {}, double tol = 1e-10);

/// PAPR in dB to peak power: P = q 10^(PAPR/10).
inline double peak_from_papr(double q, double papr_db) { return q * std::pow(10.0, papr_db / 10.0); }

}  // namespace lsep
