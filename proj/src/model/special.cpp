#include "lsep/model/special.hpp"

#include <cmath>

namespace lsep {

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double one_minus_exp_over(double x) {
  if (x == 0.0) return 1.0;
  return -std::expm1(-x) / x;
}

}  // namespace lsep
