#pragma once

#include "lsep/model/channel.hpp"

namespace lsep {

/// R-transform of the spectrum of H^H H. For iid channels this is
/// 1 / (alpha (1 - w)) and requires w < 1. For empirical spectra the
/// Stieltjes transform G(s) = mean(1 / (s - l)) is inverted by bisection on
/// s < min(l) (w < 0) or s > max(l) (w > 0), and R(w) = G^{-1}(w) - 1/w.
double r_transform(const ChannelEnsemble& ens, double w);

/// dR/dw. Analytic for iid; central difference with step 1e-6 max(1, |w|) otherwise.
double r_transform_derivative(const ChannelEnsemble& ens, double w);

/// Integral of R(-w) dw over [a, b].
double r_transform_integral(const ChannelEnsemble& ens, double a, double b);

/// Stieltjes transform mean(1 / (s - l)) of an eigenvalue list.
double stieltjes(const std::vector<double>& eigenvalues, double s);

}  // namespace lsep
