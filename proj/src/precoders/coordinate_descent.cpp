#include <algorithm>
#include <cmath>
#include <numeric>

#include "lsep/error.hpp"
#include "lsep/kernels/kernels.hpp"
#include "lsep/model/rng.hpp"
#include "lsep/precoders/precoders.hpp"

namespace lsep {
namespace {

struct Run {
  CVector v;
  double objective = 0.0;
  int sweeps = 0;
  bool converged = false;
  double last_change = 0.0;
  std::vector<double> history;
};

// Cyclic coordinate descent over a constant-modulus set. Each update replaces
// v_i by the set point maximizing Re(conj(x) b_i), b_i = h_i^H r_i, and is
// taken only if it strictly improves, so the objective never increases.
// lambda ||v||^2 is constant on the set and does not enter the updates.
Run descend(const ConstraintSet& set, const CMatrix& H, const CVector& b, double lambda, CVector v,
            const std::vector<int>& order, const SolverOptions& opts, kernels::Isa isa) {
  const auto K = static_cast<std::size_t>(H.rows());
  const bool discrete = set.kind() == SetKind::MPSK;
  std::vector<double> col_norm(static_cast<std::size_t>(H.cols()));
  for (Eigen::Index i = 0; i < H.cols(); ++i) col_norm[i] = H.col(i).squaredNorm();
  CVector r = b - H * v;
  const double vnorm = lambda * v.squaredNorm();

  Run run;
  double prev = r.squaredNorm() + vnorm;
  run.history.push_back(prev);
  for (int sweep = 0; sweep < opts.max_iter; ++sweep) {
    bool changed = false;
    for (int i : order) {
      if (col_norm[i] == 0.0) continue;
      const Complex* h = H.col(i).data();
      const Complex bi = kernels::cdotc(h, r.data(), K, isa) + col_norm[i] * v(i);
      const Complex x = scalar_constrained_min(set, bi, col_norm[i]);
      const double gain = (std::conj(x) * bi).real() - (std::conj(v(i)) * bi).real();
      if (!(gain > 0.0)) continue;
      kernels::caxpy(v(i) - x, h, r.data(), K, isa);
      v(i) = x;
      changed = true;
    }
    const double cur = r.squaredNorm() + vnorm;
    run.history.push_back(cur);
    run.sweeps = sweep + 1;
    run.last_change = prev - cur;
    const bool settled = discrete ? !changed : (prev - cur) < opts.tol;
    prev = cur;
    if (settled) {
      run.converged = true;
      break;
    }
  }
  run.v = std::move(v);
  return run;
}

PrecodeResult multistart(const ConstraintSet& set, const CMatrix& H, const CVector& u, const SystemParams& params,
                         const SolverOptions& opts, int default_restarts) {
  if (H.rows() == 0 || H.cols() == 0 || u.size() != H.rows()) throw InvalidArgument("dimension mismatch");
  params.validate();
  const int N = static_cast<int>(H.cols());
  const int restarts = opts.restarts > 0 ? opts.restarts : default_restarts;
  const CVector b = std::sqrt(params.gamma) * u;
  const auto isa = kernels::active_isa();

  PrecodeResult best;
  bool have = false;
  for (int rs = 0; rs < restarts; ++rs) {
    CVector v0(N);
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    if (rs == 0) {
      SystemParams ws = params;
      ws.lambda = std::max(params.lambda, 1e-3);
      const CVector z = rzf_precode(H, u, ws).v;
      for (int i = 0; i < N; ++i) v0(i) = project(set, z(i));
    } else {
      Rng rng(derive_seed(opts.seed, {stream::kRestart, static_cast<std::uint64_t>(rs)}));
      if (set.kind() == SetKind::MPSK) {
        std::uniform_int_distribution<int> pick(0, set.order() - 1);
        for (int i = 0; i < N; ++i) v0(i) = set.point(pick(rng));
      } else {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
        for (int i = 0; i < N; ++i) v0(i) = std::polar(set.amplitude(), phase(rng));
      }
      std::shuffle(order.begin(), order.end(), rng);
    }
    Run run = descend(set, H, b, params.lambda, std::move(v0), order, opts, isa);
    const double obj = objective(H, u, params, run.v);
    if (!have || obj < best.objective) {
      have = true;
      best.v = std::move(run.v);
      best.objective = obj;
      best.iterations = run.sweeps;
      best.converged = run.converged;
      best.residual_norm = std::abs(run.last_change);
      best.history = std::move(run.history);
      best.best_restart = rs;
    }
  }
  return best;
}

}  // namespace

PrecodeResult lse_circle(const CMatrix& H, const CVector& u, const SystemParams& params, double P,
                         const SolverOptions& opts) {
  return multistart(ConstraintSet::circle(P), H, u, params, opts, 8);
}

PrecodeResult lse_mpsk(const CMatrix& H, const CVector& u, const SystemParams& params, int M, double P,
                       const SolverOptions& opts) {
  return multistart(ConstraintSet::mpsk(M, P), H, u, params, opts, 32);
}

}  // namespace lsep
