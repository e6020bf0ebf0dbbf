#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lsep/model/channel.hpp"
#include "lsep/model/constraint_set.hpp"
#include "lsep/model/params.hpp"
#include "lsep/precoders/precoders.hpp"

namespace lsep {

/// Mean and standard error (sample stddev / sqrt(trials)) of per-trial
/// distortion ||H v - sqrt(gamma) u||^2 / K.
struct EmpiricalResult {
  double mean = 0.0;
  double stderr_ = 0.0;
  int trials = 0;
  int nonconverged = 0;
  std::vector<double> samples;
};

using PrecodeFn = std::function<PrecodeResult(const CMatrix& H, const CVector& u, const SystemParams& params,
                                              std::uint64_t seed)>;

/// Trial t draws H and u ~ CN(0, sigma_u2 I) from streams derived from
/// (seed, t), so every solver sees the same instances for the same seed.
/// Trials run concurrently on up to `threads` workers (0: hardware default);
/// the result does not depend on scheduling.
EmpiricalResult empirical_distortion(const PrecodeFn& solver, const ChannelEnsemble& ens, const SystemParams& params,
                                     int trials, std::uint64_t seed, unsigned threads = 0);

/// Convenience overload using lse_precode for the set.
EmpiricalResult empirical_distortion(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                                     int trials, std::uint64_t seed, const SolverOptions& opts = {},
                                     unsigned threads = 0);

/// Seed of trial t.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

}  // namespace lsep
