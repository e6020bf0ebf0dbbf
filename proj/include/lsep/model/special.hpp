#pragma once

namespace lsep {

/// Standard Gaussian tail P(X > x) via erfc; relative error near machine precision.
double gaussian_q(double x);

/// (1 - exp(-x)) / x, continuous at x = 0.
double one_minus_exp_over(double x);

}  // namespace lsep
