#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "lsep/types.hpp"

namespace lsep {

/// Entries iid CN(0, 1/N).
struct IidGaussian {};

/// Eigenvalues of R = H^H H (N values, nonnegative).
struct Empirical {
  std::vector<double> eigenvalues;
};

using Spectrum = std::variant<IidGaussian, Empirical>;

/// K users, N antennas, alpha = N / K. K = N = 0 marks a large-system
/// description that carries only alpha and the spectrum.
struct ChannelEnsemble {
  int K = 0;
  int N = 0;
  double alpha = 1.0;
  Spectrum spectrum = IidGaussian{};

  static ChannelEnsemble iid(int K, int N);
  static ChannelEnsemble iid_load(double alpha);
  static ChannelEnsemble empirical(std::vector<double> eigenvalues, double alpha);

  bool is_iid() const { return std::holds_alternative<IidGaussian>(spectrum); }
  bool has_dimensions() const { return K > 0 && N > 0; }
  void validate() const;
};

/// K x N matrix with iid CN(0, 1/N) entries drawn from a stream seeded by `seed`.
CMatrix sample_channel(const ChannelEnsemble& ens, std::uint64_t seed);

/// Length-n vector with iid CN(0, variance) entries.
CVector sample_symbols(int n, double variance, std::uint64_t seed);

/// Eigenvalues of H^H H in ascending order, clamped at zero.
std::vector<double> gram_eigenvalues(const CMatrix& H);

}  // namespace lsep
