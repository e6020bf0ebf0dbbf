#include "lsep/model/channel.hpp"

#include <algorithm>
#include <cmath>

#include "lsep/error.hpp"
#include "lsep/model/params.hpp"
#include "lsep/model/rng.hpp"

namespace lsep {

ChannelEnsemble ChannelEnsemble::iid(int K, int N) {
  if (K < 1 || N < 1) throw InvalidArgument("channel dimensions must satisfy K >= 1, N >= 1");
  ChannelEnsemble e;
  e.K = K;
  e.N = N;
  e.alpha = static_cast<double>(N) / K;
  return e;
}

ChannelEnsemble ChannelEnsemble::iid_load(double alpha) {
  ChannelEnsemble e;
  e.alpha = alpha;
  e.validate();
  return e;
}

ChannelEnsemble ChannelEnsemble::empirical(std::vector<double> eigenvalues, double alpha) {
  ChannelEnsemble e;
  e.alpha = alpha;
  e.spectrum = Empirical{std::move(eigenvalues)};
  e.validate();
  return e;
}

void ChannelEnsemble::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be finite and > 0");
  if ((K == 0) != (N == 0) || K < 0 || N < 0) throw InvalidArgument("channel dimensions must both be set or both be zero");
  if (const auto* emp = std::get_if<Empirical>(&spectrum)) {
    if (emp->eigenvalues.empty()) throw InvalidArgument("empirical spectrum needs at least one eigenvalue");
    for (double l : emp->eigenvalues)
      if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidArgument("empirical eigenvalues must be finite and >= 0");
  }
}

void SystemParams::validate() const {
  if (!std::isfinite(gamma) || !std::isfinite(lambda) || !std::isfinite(sigma_u2) || !std::isfinite(sigma_n2))
    throw InvalidArgument("system parameters must be finite");
  if (gamma < 0.0) throw InvalidArgument("gamma must be >= 0");
  if (!(sigma_u2 > 0.0)) throw InvalidArgument("sigma_u2 must be > 0");
  if (sigma_n2 < 0.0) throw InvalidArgument("sigma_n2 must be >= 0");
}

void SystemParams::validate_strict() const {
  validate();
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be > 0");
}

CMatrix sample_channel(const ChannelEnsemble& ens, std::uint64_t seed) {
  ens.validate();
  if (!ens.is_iid()) throw InvalidArgument("sample_channel: an empirical spectrum has no matrix realization");
  if (!ens.has_dimensions()) throw InvalidArgument("sample_channel: ensemble has no finite dimensions");
  Rng rng(derive_seed(seed, {stream::kChannel}));
  const double var = 1.0 / ens.N;
  CMatrix H(ens.K, ens.N);
  for (int r = 0; r < ens.K; ++r)
    for (int c = 0; c < ens.N; ++c) H(r, c) = complex_normal(rng, var);
  return H;
}

CVector sample_symbols(int n, double variance, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample_symbols: n must be >= 1");
  Rng rng(derive_seed(seed, {stream::kSymbols}));
  CVector u(n);
  for (int i = 0; i < n; ++i) u(i) = complex_normal(rng, variance);
  return u;
}

std::vector<double> gram_eigenvalues(const CMatrix& H) {
  const CMatrix G = H.adjoint() * H;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(G, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("gram_eigenvalues: eigen solver failed");
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  for (double& l : out) l = std::max(l, 0.0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace lsep
