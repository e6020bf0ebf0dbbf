#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lsep/types.hpp"

namespace lsep {

enum class SetKind { Unconstrained, Disk, Circle, MPSK };

/// Per-antenna alphabet. Disk(P) holds |x|^2 <= P, Circle(P) holds |x|^2 == P,
/// MPSK(M, P) holds sqrt(P) * exp(j 2 pi k / M) for k = 0..M-1.
class ConstraintSet {
 public:
  static ConstraintSet unconstrained();
  static ConstraintSet disk(double P);
  static ConstraintSet circle(double P);
  static ConstraintSet mpsk(int M, double P = 1.0);

  /// Accepts "none", "disk:P", "circle:P", "psk:M" and "psk:M:P".
  static ConstraintSet parse(std::string_view text);

  SetKind kind() const { return kind_; }
  double power() const { return P_; }
  double amplitude() const { return sqrtP_; }
  int order() const { return M_; }
  bool bounded() const { return kind_ != SetKind::Unconstrained; }
  bool constant_modulus() const { return kind_ == SetKind::Circle || kind_ == SetKind::MPSK; }

  /// Unit roots cos(2 pi k / M), sin(2 pi k / M); exact at multiples of pi/2.
  const std::vector<double>& root_cos() const { return *cos_; }
  const std::vector<double>& root_sin() const { return *sin_; }
  Complex point(int k) const;

  bool contains(Complex x, double tol = 1e-12) const;
  std::string to_string() const;

 private:
  ConstraintSet(SetKind kind, double P, int M);

  SetKind kind_;
  double P_;
  double sqrtP_;
  int M_;
  std::shared_ptr<const std::vector<double>> cos_;
  std::shared_ptr<const std::vector<double>> sin_;
};

/// argmin over x in the set of |z - c x|, c > 0. Ties resolve to the smallest
/// phase in [0, 2 pi); the origin maps to phase 0 on constant-modulus sets.
Complex scalar_constrained_min(const ConstraintSet& set, Complex z, double c);

/// Index k of the MPSK point chosen by scalar_constrained_min.
int mpsk_nearest_index(const ConstraintSet& set, Complex z);

/// Nearest feasible point (Euclidean projection; c = 1 in scalar_constrained_min).
inline Complex project(const ConstraintSet& set, Complex z) { return scalar_constrained_min(set, z, 1.0); }

}  // namespace lsep
