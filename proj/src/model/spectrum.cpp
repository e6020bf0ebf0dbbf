#include "lsep/model/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lsep/error.hpp"

namespace lsep {
namespace {

struct Moments {
  double g;   // mean(1 / (s - l))
  double lg;  // mean(l / (s - l))
};

Moments moments(const std::vector<double>& l, double s) {
  double g = 0.0, lg = 0.0;
  for (double v : l) {
    const double inv = 1.0 / (s - v);
    g += inv;
    lg += v * inv;
  }
  const double n = static_cast<double>(l.size());
  return {g / n, lg / n};
}

// Finds s outside the support with G(s) = w; s = edge + sign * exp(tau).
double invert_stieltjes(const std::vector<double>& l, double w) {
  const auto [lo_it, hi_it] = std::minmax_element(l.begin(), l.end());
  const double sign = w < 0.0 ? -1.0 : 1.0;
  const double edge = w < 0.0 ? *lo_it : *hi_it;
  const double scale = std::max(1.0, std::abs(edge));
  auto G = [&](double tau) { return moments(l, edge + sign * scale * std::exp(tau)).g; };
  // |G| falls monotonically in tau; widen the bracket until it straddles w.
  double a = -40.0, b = 40.0;
  for (int k = 0; k < 60 && std::abs(G(a)) < std::abs(w); ++k) a -= 40.0;
  for (int k = 0; k < 60 && std::abs(G(b)) > std::abs(w); ++k) b += 40.0;
  if (std::abs(G(a)) < std::abs(w) || std::abs(G(b)) > std::abs(w))
    throw ConvergenceError("r_transform: cannot bracket the Stieltjes inverse");
  for (int it = 0; it < 400 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    if (std::abs(G(m)) > std::abs(w))
      a = m;
    else
      b = m;
  }
  return edge + sign * scale * std::exp(0.5 * (a + b));
}

double empirical_r(const std::vector<double>& l, double w) {
  if (!std::isfinite(w)) throw DomainError("r_transform: argument must be finite");
  if (w == 0.0) {
    double m = 0.0;
    for (double v : l) m += v;
    return m / static_cast<double>(l.size());
  }
  const double s = invert_stieltjes(l, w);
  const Moments mo = moments(l, s);
  // s - 1/G(s) rearranged to avoid cancellation.
  return mo.lg / mo.g;
}

}  // namespace

double stieltjes(const std::vector<double>& eigenvalues, double s) {
  if (eigenvalues.empty()) throw InvalidArgument("stieltjes: empty spectrum");
  return moments(eigenvalues, s).g;
}

double r_transform(const ChannelEnsemble& ens, double w) {
  if (ens.is_iid()) {
    if (!(w < 1.0)) throw DomainError("r_transform: iid spectrum requires w < 1");
    return 1.0 / (ens.alpha * (1.0 - w));
  }
  return empirical_r(std::get<Empirical>(ens.spectrum).eigenvalues, w);
}

double r_transform_derivative(const ChannelEnsemble& ens, double w) {
  if (ens.is_iid()) {
    if (!(w < 1.0)) throw DomainError("r_transform_derivative: iid spectrum requires w < 1");
    return 1.0 / (ens.alpha * (1.0 - w) * (1.0 - w));
  }
  const double h = 1e-6 * std::max(1.0, std::abs(w));
  return (r_transform(ens, w + h) - r_transform(ens, w - h)) / (2.0 * h);
}

double r_transform_integral(const ChannelEnsemble& ens, double a, double b) {
  if (ens.is_iid()) {
    if (!(a > -1.0) || !(b > -1.0)) throw DomainError("r_transform_integral: iid spectrum requires arguments > -1");
    return std::log1p((b - a) / (1.0 + a)) / ens.alpha;
  }
  if (a == b) return 0.0;
  auto f = [&](double w) { return r_transform(ens, -w); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 8, 1e-12);
}

}  // namespace lsep
