#include "lsep/precoders/precoders.hpp"

#include <cmath>
#include <string>

#include "lsep/error.hpp"
#include "lsep/kernels/kernels.hpp"
#include "lsep/model/rng.hpp"

namespace lsep {
namespace {

void check_dims(const CMatrix& H, const CVector& u) {
  if (H.rows() == 0 || H.cols() == 0) throw InvalidArgument("channel matrix is empty");
  if (u.size() != H.rows())
    throw InvalidArgument("dimension mismatch: H has " + std::to_string(H.rows()) + " rows, u has " +
                          std::to_string(u.size()) + " entries");
}

// Largest eigenvalue of H^H H by power iteration (50 steps, relative tolerance 1e-8).
double sigma_max_squared(const CMatrix& H, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0x504f5745ULL}));
  CVector x(H.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = complex_normal(rng, 1.0);
  x.normalize();
  double est = 0.0;
  for (int it = 0; it < 50; ++it) {
    CVector y = H.adjoint() * (H * x);
    const double nrm = y.norm();
    if (nrm == 0.0) return 0.0;
    x = y / nrm;
    const bool done = std::abs(nrm - est) <= 1e-8 * nrm;
    est = nrm;
    if (done) break;
  }
  // A few power steps underestimate; the Rayleigh bound keeps the step safe.
  return est * 1.01;
}

void project_disk(CVector& x, double amplitude) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = std::abs(x(i));
    if (r > amplitude) x(i) *= amplitude / r;
  }
}

}  // namespace

double objective(const CMatrix& H, const CVector& u, const SystemParams& params, const CVector& x) {
  check_dims(H, u);
  if (x.size() != H.cols())
    throw InvalidArgument("dimension mismatch: H has " + std::to_string(H.cols()) + " columns, x has " +
                          std::to_string(x.size()) + " entries");
  const CVector r = H * x - std::sqrt(params.gamma) * u;
  return r.squaredNorm() + params.lambda * x.squaredNorm();
}

PrecodeResult rzf_precode(const CMatrix& H, const CVector& u, const SystemParams& params) {
  check_dims(H, u);
  params.validate();
  const Eigen::Index K = H.rows();
  const CMatrix A = H * H.adjoint() + params.lambda * CMatrix::Identity(K, K);
  CVector w;
  if (params.lambda > 0.0) {
    Eigen::LLT<CMatrix> llt(A);
    if (llt.info() != Eigen::Success) throw InvalidArgument("rzf_precode: H H^H + lambda I is not positive definite");
    w = llt.solve(u);
  } else {
    Eigen::FullPivLU<CMatrix> lu(A);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw InvalidArgument("rzf_precode: H H^H + lambda I is singular; use lambda > 0");
    w = lu.solve(u);
  }
  PrecodeResult res;
  res.v = std::sqrt(params.gamma) * (H.adjoint() * w);
  res.objective = objective(H, u, params, res.v);
  res.iterations = 1;
  res.converged = true;
  res.history = {res.objective};
  return res;
}

PrecodeResult lse_disk(const CMatrix& H, const CVector& u, const SystemParams& params, double P,
                       const SolverOptions& opts) {
  check_dims(H, u);
  params.validate();
  if (!(P > 0.0)) throw InvalidArgument("lse_disk: peak power P must be > 0");
  const double amp = std::sqrt(P);
  const double lambda = params.lambda;
  const CVector b = std::sqrt(params.gamma) * u;

  const double s2 = sigma_max_squared(H, opts.seed);
  double L = 2.0 * std::max(s2 + lambda, std::abs(lambda));
  if (!(L > 0.0)) L = 1.0;

  // Warm start: clipped RZF with a positive regularizer.
  SystemParams ws = params;
  ws.lambda = std::max(lambda, 1e-3);
  CVector x = rzf_precode(H, u, ws).v;
  project_disk(x, amp);

  auto value = [&](const CVector& Hx, const CVector& v) { return (Hx - b).squaredNorm() + lambda * v.squaredNorm(); };
  CVector Hx = H * x;
  double F = value(Hx, x);
  const double F0 = b.squaredNorm();
  CVector y = x, Hy = Hx;
  double t = 1.0;

  // Max-norm of the gradient mapping L (x - proj(x - grad / L)); zero exactly at KKT points.
  auto mapping_norm = [&](const CVector& v, const CVector& Hv) {
    const CVector g = 2.0 * (H.adjoint() * (Hv - b) + lambda * v);
    CVector step = v - g / L;
    project_disk(step, amp);
    return L * (v - step).cwiseAbs().maxCoeff();
  };
  const double kkt_tol = std::sqrt(opts.tol) * 1e-2 * std::max(1.0, 2.0 * (H.adjoint() * b).cwiseAbs().maxCoeff());

  PrecodeResult res;
  res.history.push_back(F);
  int it = 0;
  bool converged = false;
  for (; it < opts.max_iter; ++it) {
    CVector xn = y - (2.0 / L) * (H.adjoint() * (Hy - b) + lambda * y);
    project_disk(xn, amp);
    CVector Hxn = H * xn;
    const double Fn = value(Hxn, xn);
    if (Fn > F && t > 1.0) {
      // Momentum overshot: restart from the last accepted iterate.
      t = 1.0;
      y = x;
      Hy = Hx;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / tn;
    y = xn + beta * (xn - x);
    Hy = Hxn + beta * (Hxn - Hx);
    const double dF = F - Fn;
    x = std::move(xn);
    Hx = std::move(Hxn);
    t = tn;
    F = Fn;
    res.history.push_back(F);
    if (std::abs(dF) <= opts.tol * (std::abs(F) + 1e-8 * F0) && mapping_norm(x, Hx) <= kkt_tol) {
      converged = true;
      ++it;
      break;
    }
  }

  CVector g = 2.0 * (H.adjoint() * (Hx - b) + lambda * x);
  CVector step = x - g / L;
  project_disk(step, amp);
  res.residual_norm = L * (x - step).norm();
  res.v = std::move(x);
  res.objective = objective(H, u, params, res.v);
  res.iterations = it;
  res.converged = converged;
  return res;
}

PrecodeResult lse_bruteforce(const CMatrix& H, const CVector& u, const SystemParams& params,
                             const ConstraintSet& set, std::uint64_t limit) {
  check_dims(H, u);
  params.validate();
  if (set.kind() != SetKind::MPSK) throw InvalidArgument("lse_bruteforce: only MPSK sets are enumerable");
  const int N = static_cast<int>(H.cols());
  const int M = set.order();
  std::uint64_t total = 1;
  for (int i = 0; i < N; ++i) {
    if (total > limit / static_cast<std::uint64_t>(M))
      throw TooLarge("lse_bruteforce: M^N exceeds the enumeration limit " + std::to_string(limit));
    total *= static_cast<std::uint64_t>(M);
  }
  const auto isa = kernels::active_isa();
  const CVector b = std::sqrt(params.gamma) * u;
  const Eigen::Index K = H.rows();

  // Modular M-ary Gray code: each step advances one digit by one, mod M.
  std::vector<int> count(N, 0), gray(N, 0);
  CVector v = CVector::Constant(N, set.point(0));
  CVector r = b - H * v;
  double best = r.squaredNorm();
  std::vector<int> best_gray = gray;
  for (std::uint64_t step = 1; step < total; ++step) {
    int j = 0;
    while (count[j] == M - 1) count[j++] = 0;
    ++count[j];
    gray[j] = (gray[j] + 1) % M;
    const Complex next = set.point(gray[j]);
    kernels::caxpy(v(j) - next, H.col(j).data(), r.data(), static_cast<std::size_t>(K), isa);
    v(j) = next;
    if ((step & 1023u) == 0) r = b - H * v;  // bound accumulated rounding
    const double val = r.squaredNorm();
    if (val < best) {
      best = val;
      best_gray = gray;
    }
  }
  PrecodeResult res;
  res.v.resize(N);
  for (int i = 0; i < N; ++i) res.v(i) = set.point(best_gray[i]);
  res.objective = objective(H, u, params, res.v);
  res.iterations = static_cast<int>(std::min<std::uint64_t>(total, static_cast<std::uint64_t>(INT32_MAX)));
  res.converged = true;
  res.history = {res.objective};
  return res;
}

PrecodeResult lse_precode(const ConstraintSet& set, const CMatrix& H, const CVector& u, const SystemParams& params,
                          const SolverOptions& opts) {
  switch (set.kind()) {
    case SetKind::Unconstrained: return rzf_precode(H, u, params);
    case SetKind::Disk: return lse_disk(H, u, params, set.power(), opts);
    case SetKind::Circle: return lse_circle(H, u, params, set.power(), opts);
    case SetKind::MPSK: return lse_mpsk(H, u, params, set.order(), set.power(), opts);
  }
  throw InvalidArgument("lse_precode: unknown set");
}

}  // namespace lsep
