#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace lsep {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// 10*log10 of a power quantity. Zero maps to -inf.
inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace lsep
