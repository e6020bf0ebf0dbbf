#pragma once

// Per-point operations shared by the scalar kernels and the vector tails.
// Arithmetic is written as separate multiplies and adds so that, with
// contraction disabled, the vector lanes reproduce the same roundings.

#include <algorithm>
#include <cmath>
#include <utility>

#include "lsep/kernels/kernels.hpp"

namespace lsep::kernels::detail {

inline constexpr int kMaxScoredOrder = 16;

inline int mpsk_index_by_angle(const SetView& s, double wr, double wi) {
  const int M = s.order;
  double theta = std::atan2(wi, wr);
  if (theta < 0.0) theta += 2.0 * kPi;
  const long k0 = std::lround(theta * M / (2.0 * kPi)) % M;
  long cand[3] = {(k0 + M - 1) % M, k0, (k0 + 1) % M};
  if (cand[0] > cand[1]) std::swap(cand[0], cand[1]);
  if (cand[1] > cand[2]) std::swap(cand[1], cand[2]);
  if (cand[0] > cand[1]) std::swap(cand[0], cand[1]);
  int best = -1;
  double best_score = 0.0;
  for (long k : cand) {
    const double sc = wr * s.root_cos[k] + wi * s.root_sin[k];
    if (best < 0 || sc > best_score) {
      best = static_cast<int>(k);
      best_score = sc;
    }
  }
  return best;
}

inline int mpsk_index_by_score(const SetView& s, double wr, double wi) {
  int best = 0;
  double best_score = wr * s.root_cos[0] + wi * s.root_sin[0];
  for (int k = 1; k < s.order; ++k) {
    const double sc = wr * s.root_cos[k] + wi * s.root_sin[k];
    if (sc > best_score) {
      best = k;
      best_score = sc;
    }
  }
  return best;
}

inline void point_min(const SetView& s, double wr, double wi, double c, double& xr, double& xi) {
  switch (s.kind) {
    case SetKind::Unconstrained:
      xr = wr / c;
      xi = wi / c;
      return;
    case SetKind::Disk: {
      const double r = std::sqrt(wr * wr + wi * wi);
      if (r == 0.0) {
        xr = 0.0;
        xi = 0.0;
        return;
      }
      const double mag = std::min(s.amplitude, r / c);
      const double f = mag / r;
      xr = wr * f;
      xi = wi * f;
      return;
    }
    case SetKind::Circle: {
      const double r = std::sqrt(wr * wr + wi * wi);
      if (r == 0.0) {
        xr = s.amplitude;
        xi = 0.0;
        return;
      }
      const double f = s.amplitude / r;
      xr = wr * f;
      xi = wi * f;
      return;
    }
    case SetKind::MPSK: {
      const int k = s.order <= kMaxScoredOrder ? mpsk_index_by_score(s, wr, wi) : mpsk_index_by_angle(s, wr, wi);
      xr = s.amplitude * s.root_cos[k];
      xi = s.amplitude * s.root_sin[k];
      return;
    }
  }
}

}  // namespace lsep::kernels::detail
