#pragma once

namespace lsep {

/// gamma scales the intended received signal, lambda weights ||x||^2.
/// lambda may be negative when it is tuned to hit a target average power.
struct SystemParams {
  double gamma = 1.0;
  double lambda = 0.0;
  double sigma_u2 = 1.0;
  double sigma_n2 = 0.0;

  /// gamma * sigma_u^2, the power of the intended received signal.
  double signal_power() const { return gamma * sigma_u2; }

  /// Finite fields, gamma >= 0, sigma_u2 > 0, sigma_n2 >= 0.
  void validate() const;
  /// validate() plus gamma > 0; required wherever gamma sigma_u^2 divides.
  void validate_strict() const;
};

}  // namespace lsep
