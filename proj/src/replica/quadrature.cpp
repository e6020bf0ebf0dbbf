#include "lsep/replica/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "lsep/error.hpp"

namespace lsep {
namespace {

// Eigen-decomposition of the symmetric Jacobi matrix with zero diagonal.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> jacobi(int n, double (*beta)(int)) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = beta(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) throw ConvergenceError("quadrature: Jacobi eigen-decomposition failed");
  return es;
}

// Orthonormal Hermite polynomials for exp(-x^2): values p_{n-1}, p_n and sum of p_k^2, k < n.
struct HermiteEval {
  double pn, pn1, sumsq;
};
HermiteEval hermite(int n, double x) {
  double pm = 0.0, p = std::pow(kPi, -0.25), sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += p * p;
    const double next = x * std::sqrt(2.0 / (k + 1)) * p - std::sqrt(static_cast<double>(k) / (k + 1)) * pm;
    pm = p;
    p = next;
  }
  return {p, pm, sum};
}

// Legendre nodes and weights on [-1, 1], computed once per n.
const GaussRule& legendre_reference(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const auto es = jacobi(n, [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); });
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.x[i] = es.eigenvalues()(i);
    rule.w[i] = 2.0 * v0 * v0;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace

GaussRule gauss_hermite(int n) {
  if (n < 1) throw InvalidArgument("gauss_hermite: n must be >= 1");
  const auto es = jacobi(n, [](int k) { return std::sqrt(k / 2.0); });
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    // Newton polish on p_n; p_n' = sqrt(2n) p_{n-1}.
    for (int it = 0; it < 3; ++it) {
      const auto h = hermite(n, x);
      x -= h.pn / (std::sqrt(2.0 * n) * h.pn1);
    }
    const auto h = hermite(n, x);
    rule.x[i] = x;
    rule.w[i] = 1.0 / (h.sumsq * std::sqrt(kPi));
  }
  // Enforce exact mirror symmetry.
  for (int i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.x[n - 1 - i] - rule.x[i]);
    const double w = 0.5 * (rule.w[n - 1 - i] + rule.w[i]);
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = rule.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.x[n / 2] = 0.0;
  return rule;
}

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be >= 1");
  const GaussRule& ref = legendre_reference(n);
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    rule.x[i] = mid + half * ref.x[i];
    rule.w[i] = ref.w[i] * half;
  }
  return rule;
}

QuadratureRule complex_gauss_hermite(int n) {
  const GaussRule g = gauss_hermite(n);
  QuadratureRule q;
  q.nodes_per_axis = n;
  q.re.reserve(n * n);
  q.im.reserve(n * n);
  q.w.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      q.re.push_back(g.x[i]);
      q.im.push_back(g.x[j]);
      q.w.push_back(g.w[i] * g.w[j]);
    }
  return q;
}

QuadratureRule real_axis_gauss_hermite(int n) {
  const GaussRule g = gauss_hermite(n);
  QuadratureRule q;
  q.nodes_per_axis = n;
  q.re = g.x;
  q.im.assign(n, 0.0);
  q.w = g.w;
  return q;
}

QuadratureRule polar_rule(const ConstraintSet& set, double c, int n) {
  if (n < 1) throw InvalidArgument("polar_rule: n must be >= 1");
  std::vector<double> breaks = {0.0};
  if (set.kind() == SetKind::Disk) {
    const double r0 = c * set.amplitude();
    if (r0 > 1e-12 && r0 < kPolarRadius - 1e-12) breaks.push_back(r0);
  }
  breaks.push_back(kPolarRadius);

  // Radial density after averaging the angle: 2 r exp(-r^2) dr.
  std::vector<double> rr, rw;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const GaussRule g = gauss_legendre(n, breaks[p], breaks[p + 1]);
    for (int i = 0; i < n; ++i) {
      rr.push_back(g.x[i]);
      rw.push_back(g.w[i] * 2.0 * g.x[i] * std::exp(-g.x[i] * g.x[i]));
    }
  }

  std::vector<double> th, tw;
  if (set.kind() == SetKind::MPSK) {
    const int M = set.order();
    const int nt = M <= 8 ? 16 : 8;
    for (int j = 0; j < M; ++j) {
      const double centre = 2.0 * kPi * j / M;
      const GaussRule g = gauss_legendre(nt, centre - kPi / M, centre + kPi / M);
      for (int i = 0; i < nt; ++i) {
        th.push_back(g.x[i]);
        tw.push_back(g.w[i] / (2.0 * kPi));
      }
    }
  } else {
    th.push_back(0.0);
    tw.push_back(1.0);
  }

  QuadratureRule q;
  q.nodes_per_axis = n;
  q.re.reserve(rr.size() * th.size());
  q.im.reserve(rr.size() * th.size());
  q.w.reserve(rr.size() * th.size());
  for (std::size_t a = 0; a < th.size(); ++a) {
    const double cs = std::cos(th[a]), sn = std::sin(th[a]);
    for (std::size_t i = 0; i < rr.size(); ++i) {
      q.re.push_back(rr[i] * cs);
      q.im.push_back(rr[i] * sn);
      q.w.push_back(rw[i] * tw[a]);
    }
  }
  return q;
}

}  // namespace lsep
