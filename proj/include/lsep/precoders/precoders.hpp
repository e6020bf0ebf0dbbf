#pragma once

#include <cstdint>
#include <vector>

#include "lsep/model/constraint_set.hpp"
#include "lsep/model/params.hpp"
#include "lsep/types.hpp"

namespace lsep {

struct PrecodeResult {
  CVector v;
  /// ||H v - sqrt(gamma) u||^2 + lambda ||v||^2, recomputed at v.
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Disk: norm of the gradient mapping. Coordinate methods: last sweep's objective change.
  double residual_norm = 0.0;
  /// Objective after each iteration (gradient step or sweep) of the best run.
  std::vector<double> history;
  /// Index of the restart that produced v (coordinate methods).
  int best_restart = 0;
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 100000;
  /// Coordinate methods only: 0 selects the per-method default (8 circle, 32 MPSK).
  int restarts = 0;
  std::uint64_t seed = 0;
};

/// ||H x - sqrt(gamma) u||^2 + lambda ||x||^2.
double objective(const CMatrix& H, const CVector& u, const SystemParams& params, const CVector& x);

/// v = sqrt(gamma) H^H (H H^H + lambda I)^{-1} u; the unconstrained minimizer.
PrecodeResult rzf_precode(const CMatrix& H, const CVector& u, const SystemParams& params);

/// Accelerated projected gradient on the per-antenna disk |v_i|^2 <= P.
PrecodeResult lse_disk(const CMatrix& H, const CVector& u, const SystemParams& params, double P,
                       const SolverOptions& opts = {});

/// Cyclic phase coordinate descent with restarts on |v_i|^2 = P.
PrecodeResult lse_circle(const CMatrix& H, const CVector& u, const SystemParams& params, double P,
                         const SolverOptions& opts = {});

/// Discrete coordinate descent with restarts on sqrt(P) exp(j 2 pi k / M); the result is 1-opt.
PrecodeResult lse_mpsk(const CMatrix& H, const CVector& u, const SystemParams& params, int M, double P = 1.0,
                       const SolverOptions& opts = {});

/// Exact minimizer over MPSK^N by Gray-code enumeration. Throws TooLarge if M^N > limit.
PrecodeResult lse_bruteforce(const CMatrix& H, const CVector& u, const SystemParams& params,
                             const ConstraintSet& set, std::uint64_t limit = std::uint64_t{1} << 24);

/// Solver matching the set: RZF, lse_disk, lse_circle or lse_mpsk.
PrecodeResult lse_precode(const ConstraintSet& set, const CMatrix& H, const CVector& u, const SystemParams& params,
                          const SolverOptions& opts = {});

}  // namespace lsep
