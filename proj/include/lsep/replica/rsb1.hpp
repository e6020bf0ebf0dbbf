#pragma once

#include <string>
#include <vector>

#include "lsep/model/channel.hpp"
#include "lsep/model/constraint_set.hpp"
#include "lsep/model/params.hpp"
#include "lsep/replica/quadrature.hpp"

namespace lsep {

/// One-step replica-symmetry-breaking saddle point. eta1 = chi1 + mu1 p1,
/// e1 = R(-chi1) + lambda, f1^2 = s R(-eta1) + (q1 - s eta1) R'(-eta1),
/// g1^2 = (R(-chi1) - R(-eta1)) / mu1.
struct RSBSolution {
  double q1 = 0.0;
  double p1 = 0.0;
  double chi1 = 0.0;
  double mu1 = 0.0;
  double eta1 = 0.0;
  double f1 = 0.0;
  double g1 = 0.0;
  double e1 = 0.0;
  double distortion = 0.0;
  /// distortion + lambda alpha (q1 + p1).
  double dbreve = 0.0;
  bool converged = false;
  bool reduced_to_rs = false;
  double residual = 0.0;
  int iterations = 0;
  std::string note;
};

struct RsbOptions {
  double tol = 1e-10;
  int max_inner = 5000;
  double damping = 0.5;
  double mu_lo = 1e-3;
  double mu_hi = 1e3;
  int mu_grid = 31;
  int nodes = 40;
  /// p1 at or below this value counts as the replica-symmetric solution.
  double p_floor = 1e-8;
};

struct RsbResult {
  std::vector<RSBSolution> solutions;
  std::size_t selected = 0;
  /// Whether the default choice (prefer p1 > 0) is also the largest dbreve.
  bool max_dbreve_agrees = true;
  std::string diagnostics;
  const RSBSolution& best() const { return solutions.at(selected); }
};

/// Averages over Dz Dy with the tilted weight Y / int Y Dy:
/// A = <Re conj(z) xh>, B = <|xh|^2>, C = <Re conj(y) xh>, log_z = int log int Y Dy Dz.
struct RsbMoments {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double log_z = 0.0;
};

/// Quadrature pair used by the 1-RSB integrals; other sets use the complex
/// tensor rule for both variables. BPSK depends on real parts only: the tilted
/// y-integrals are truncated Gaussians in closed form and z uses composite
/// Gauss-Legendre panels around the sign change, so `z` and `y` stay empty.
struct RsbRules {
  QuadratureRule z;
  QuadratureRule y;
  bool bpsk = false;
};
RsbRules rsb1_rules(const ConstraintSet& set, int nodes);

RsbMoments rsb1_moments(const ConstraintSet& set, const RsbRules& rules, double f, double g, double e, double mu);

/// Fixed-mu inner solve of the three moment equations from (q1, p1, chi1).
RSBSolution rsb1_inner(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                       const RsbRules& rules, double mu, double q1, double p1, double chi1, const RsbOptions& opts = {});

/// Residual (right minus left side) of the scalar mu1 equation at a state.
double rsb1_mu_residual(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                        const RsbRules& rules, const RSBSolution& state);

/// Max-norm residual of all four equations, re-evaluated from the stored state.
double rsb1_residual(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                     const RSBSolution& sol, const RsbOptions& opts = {});

/// Full solve: scans mu1 on a log grid, refines sign changes of the mu1
/// residual, and always includes the replica-symmetric point (p1 = 0).
RsbResult rsb1_solve(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                     const RsbOptions& opts = {});

/// D = s - (alpha chi1 / mu1) R(-chi1) + alpha (q1 + eta1 / mu1 - 2 s eta1) R(-eta1)
///       - alpha eta1 (q1 - s eta1) R'(-eta1). Throws DomainError when mu1 = 0.
double rsb1_distortion(const RSBSolution& sol, const ChannelEnsemble& ens, const SystemParams& params);

}  // namespace lsep
