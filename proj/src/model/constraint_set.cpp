#include "lsep/model/constraint_set.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "lsep/error.hpp"

namespace lsep {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (;;) {
    const size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(std::string_view s, std::string_view what) {
  try {
    size_t used = 0;
    const std::string str(s);
    const double v = std::stod(str, &used);
    if (used != str.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("constraint: cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  }
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("constraint: cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  return v;
}

void require_power(double P) {
  if (!(P > 0.0) || !std::isfinite(P)) throw InvalidArgument("constraint power P must be finite and > 0");
}

}  // namespace

ConstraintSet::ConstraintSet(SetKind kind, double P, int M)
    : kind_(kind), P_(P), sqrtP_(std::sqrt(P)), M_(M) {
  auto c = std::make_shared<std::vector<double>>(static_cast<size_t>(M));
  auto s = std::make_shared<std::vector<double>>(static_cast<size_t>(M));
  for (int k = 0; k < M; ++k) {
    // Quadrant points are set exactly so that symmetric ties compare equal.
    if ((4 * static_cast<long>(k)) % M == 0) {
      static constexpr double qc[4] = {1.0, 0.0, -1.0, 0.0};
      static constexpr double qs[4] = {0.0, 1.0, 0.0, -1.0};
      const int quadrant = static_cast<int>((4 * static_cast<long>(k)) / M);
      (*c)[k] = qc[quadrant];
      (*s)[k] = qs[quadrant];
    } else {
      const double phi = 2.0 * kPi * k / M;
      (*c)[k] = std::cos(phi);
      (*s)[k] = std::sin(phi);
    }
  }
  cos_ = std::move(c);
  sin_ = std::move(s);
}

ConstraintSet ConstraintSet::unconstrained() { return ConstraintSet(SetKind::Unconstrained, 0.0, 0); }

ConstraintSet ConstraintSet::disk(double P) {
  require_power(P);
  return ConstraintSet(SetKind::Disk, P, 0);
}

ConstraintSet ConstraintSet::circle(double P) {
  require_power(P);
  return ConstraintSet(SetKind::Circle, P, 0);
}

ConstraintSet ConstraintSet::mpsk(int M, double P) {
  if (M < 2) throw InvalidArgument("MPSK order M must be >= 2");
  require_power(P);
  return ConstraintSet(SetKind::MPSK, P, M);
}

ConstraintSet ConstraintSet::parse(std::string_view text) {
  const auto parts = split(text, ':');
  const std::string_view head = parts[0];
  if ((head == "none" || head == "unconstrained") && parts.size() == 1) return unconstrained();
  if (head == "disk" && parts.size() == 2) return disk(parse_real(parts[1], "peak power"));
  if ((head == "circle" || head == "ce") && parts.size() == 2) return circle(parse_real(parts[1], "power"));
  if (head == "psk" && (parts.size() == 2 || parts.size() == 3)) {
    const int M = parse_int(parts[1], "order");
    const double P = parts.size() == 3 ? parse_real(parts[2], "power") : 1.0;
    return mpsk(M, P);
  }
  throw InvalidArgument("constraint: expected none | disk:P | circle:P | psk:M[:P], got '" + std::string(text) + "'");
}

Complex ConstraintSet::point(int k) const {
  if (kind_ != SetKind::MPSK || k < 0 || k >= M_) throw InvalidArgument("point index out of range");
  return {sqrtP_ * (*cos_)[k], sqrtP_ * (*sin_)[k]};
}

bool ConstraintSet::contains(Complex x, double tol) const {
  switch (kind_) {
    case SetKind::Unconstrained:
      return std::isfinite(x.real()) && std::isfinite(x.imag());
    case SetKind::Disk:
      return std::abs(x) <= sqrtP_ + tol;
    case SetKind::Circle:
      return std::abs(std::abs(x) - sqrtP_) <= tol;
    case SetKind::MPSK:
      for (int k = 0; k < M_; ++k)
        if (std::abs(x - point(k)) <= tol) return true;
      return false;
  }
  return false;
}

std::string ConstraintSet::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case SetKind::Unconstrained: os << "none"; break;
    case SetKind::Disk: os << "disk:" << P_; break;
    case SetKind::Circle: os << "circle:" << P_; break;
    case SetKind::MPSK: os << "psk:" << M_ << ':' << P_; break;
  }
  return os.str();
}

int mpsk_nearest_index(const ConstraintSet& set, Complex z) {
  const int M = set.order();
  const auto& cs = set.root_cos();
  const auto& sn = set.root_sin();
  double theta = std::atan2(z.imag(), z.real());
  if (theta < 0.0) theta += 2.0 * kPi;
  const long k0 = std::lround(theta * M / (2.0 * kPi)) % M;
  // Score the rounded sector and its neighbours; the smallest index wins ties.
  int best = -1;
  double best_score = 0.0;
  const long cand[3] = {(k0 + M - 1) % M, k0, (k0 + 1) % M};
  int sorted[3] = {static_cast<int>(cand[0]), static_cast<int>(cand[1]), static_cast<int>(cand[2])};
  std::sort(sorted, sorted + 3);
  for (int k : sorted) {
    const double score = z.real() * cs[k] + z.imag() * sn[k];
    if (best < 0 || score > best_score) {
      best = k;
      best_score = score;
    }
  }
  return best;
}

Complex scalar_constrained_min(const ConstraintSet& set, Complex z, double c) {
  switch (set.kind()) {
    case SetKind::Unconstrained:
      return z / c;
    case SetKind::Disk: {
      // Same rounding as the batched kernels: plain sqrt instead of hypot.
      const double r = std::sqrt(z.real() * z.real() + z.imag() * z.imag());
      if (r == 0.0) return {0.0, 0.0};
      const double mag = std::min(set.amplitude(), r / c);
      return z * (mag / r);
    }
    case SetKind::Circle: {
      const double r = std::sqrt(z.real() * z.real() + z.imag() * z.imag());
      if (r == 0.0) return {set.amplitude(), 0.0};
      return z * (set.amplitude() / r);
    }
    case SetKind::MPSK:
      return set.point(mpsk_nearest_index(set, z));
  }
  return z;
}

}  // namespace lsep
