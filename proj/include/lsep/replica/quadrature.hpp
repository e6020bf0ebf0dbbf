#pragma once

#include <vector>

#include "lsep/model/constraint_set.hpp"

namespace lsep {

/// One-dimensional rule: sum_i w_i f(x_i).
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Hermite for the density exp(-x^2)/sqrt(pi) (weights sum to 1), by Golub-Welsch.
GaussRule gauss_hermite(int n);

/// Gauss-Legendre on [a, b] (weights sum to b - a), by Golub-Welsch.
GaussRule gauss_legendre(int n, double a, double b);

/// Rule for the complex standard Gaussian measure Dz = exp(-|z|^2)/pi dz,
/// stored as structure-of-arrays.
struct QuadratureRule {
  int nodes_per_axis = 0;
  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> w;

  std::size_t size() const { return w.size(); }
};

/// Tensor product of two Gauss-Hermite rules (n^2 nodes).
QuadratureRule complex_gauss_hermite(int n);

/// Marginal rule on the real axis (n nodes, imaginary parts zero). Exact
/// replacement for the tensor rule when the integrand depends on Re z only.
QuadratureRule real_axis_gauss_hermite(int n);

/// Polar rule adapted to the argmin over `set` with scale c: Gauss-Legendre
/// panels in the radius split where the disk clips (r = c sqrt(P)) and
/// panels in the angle split at MPSK decision boundaries. Isotropic sets use
/// a single angular node, which is exact for the rotation-invariant integrands
/// of the replica equations.
QuadratureRule polar_rule(const ConstraintSet& set, double c, int n);

/// Radius beyond which the Gaussian tail is below 1e-35.
inline constexpr double kPolarRadius = 9.0;

}  // namespace lsep
