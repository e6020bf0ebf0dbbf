#include "lsep/harness/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "lsep/error.hpp"
#include "lsep/model/rng.hpp"

namespace lsep {

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return derive_seed(seed, {stream::kTrial, static_cast<std::uint64_t>(trial)});
}

EmpiricalResult empirical_distortion(const PrecodeFn& solver, const ChannelEnsemble& ens, const SystemParams& params,
                                     int trials, std::uint64_t seed, unsigned threads) {
  ens.validate();
  params.validate();
  if (!ens.has_dimensions()) throw InvalidArgument("empirical_distortion: ensemble needs K and N");
  if (!ens.is_iid()) throw InvalidArgument("empirical_distortion: only iid channels can be sampled");
  if (trials < 1) throw InvalidArgument("empirical_distortion: trials must be >= 1");

  std::vector<double> dist(static_cast<std::size_t>(trials), 0.0);
  std::vector<char> conv(static_cast<std::size_t>(trials), 1);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const double sg = std::sqrt(params.gamma);

  auto worker = [&] {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        const std::uint64_t ts = trial_seed(seed, t);
        const CMatrix H = sample_channel(ens, ts);
        const CVector u = sample_symbols(ens.K, params.sigma_u2, ts);
        const PrecodeResult r = solver(H, u, params, ts);
        dist[t] = (H * r.v - sg * u).squaredNorm() / ens.K;
        conv[t] = r.converged ? 1 : 0;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(trials);
        return;
      }
    }
  };

  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(trials));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  EmpiricalResult res;
  res.trials = trials;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    sum += dist[t];
    if (!conv[t]) ++res.nonconverged;
  }
  res.mean = sum / trials;
  if (trials > 1) {
    double ss = 0.0;
    for (double d : dist) ss += (d - res.mean) * (d - res.mean);
    res.stderr_ = std::sqrt(ss / (trials - 1) / trials);
  }
  res.samples = std::move(dist);
  return res;
}

EmpiricalResult empirical_distortion(const ConstraintSet& set, const ChannelEnsemble& ens, const SystemParams& params,
                                     int trials, std::uint64_t seed, const SolverOptions& opts, unsigned threads) {
  PrecodeFn fn = [&set, opts](const CMatrix& H, const CVector& u, const SystemParams& p, std::uint64_t s) {
    SolverOptions o = opts;
    o.seed = s;
    return lse_precode(set, H, u, p, o);
  };
  return empirical_distortion(fn, ens, params, trials, seed, threads);
}

}  // namespace lsep
