#include "lsep/harness/ofdm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "lsep/error.hpp"

namespace lsep {
namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

void check_list(const std::vector<CMatrix>& H_list) {
  if (H_list.empty()) throw InvalidArgument("ofdm: empty subcarrier list");
  for (const auto& H : H_list)
    if (H.rows() != H_list[0].rows() || H.cols() != H_list[0].cols() || H.size() == 0)
      throw InvalidArgument("ofdm: subcarrier matrices must share a nonempty shape");
}

}  // namespace

CMatrix unitary_idft(int L) {
  if (L < 1) throw InvalidArgument("unitary_idft: L must be >= 1");
  CMatrix W(L, L);
  const double scale = 1.0 / std::sqrt(static_cast<double>(L));
  for (int m = 0; m < L; ++m)
    for (int n = 0; n < L; ++n) {
      // Reduce m n mod L first so the angle stays exact for large products.
      const double ang = 2.0 * kPi * static_cast<double>((static_cast<long long>(m) * n) % L) / L;
      W(m, n) = Complex(std::cos(ang), std::sin(ang)) * scale;
    }
  return W;
}

CMatrix ofdm_stacked_channel(const std::vector<CMatrix>& H_list) {
  check_list(H_list);
  const int L = static_cast<int>(H_list.size());
  const Eigen::Index K = H_list[0].rows(), N = H_list[0].cols();
  CMatrix Ht = CMatrix::Zero(K * L, N * L);
  for (int k = 0; k < L; ++k)
    for (Eigen::Index r = 0; r < K; ++r)
      for (Eigen::Index i = 0; i < N; ++i) Ht(k * K + r, i * L + k) = H_list[k](r, i);
  return Ht;
}

CMatrix ofdm_equivalent_channel(const std::vector<CMatrix>& H_list) {
  const CMatrix Ht = ofdm_stacked_channel(H_list);
  const int L = static_cast<int>(H_list.size());
  const CMatrix Wh = unitary_idft(L).adjoint();
  CMatrix E(Ht.rows(), Ht.cols());
  for (Eigen::Index b = 0; b < Ht.cols() / L; ++b) E.middleCols(b * L, L).noalias() = Ht.middleCols(b * L, L) * Wh;
  return E;
}

double ofdm_unitarity_residual(int L) {
  const CMatrix W = unitary_idft(L);
  return (W * W.adjoint() - CMatrix::Identity(L, L)).cwiseAbs().maxCoeff();
}

std::vector<double> ofdm_gram_eigenvalues(const CMatrix& E, int L) {
  if (L < 1 || E.cols() % L != 0) throw InvalidArgument("ofdm_gram_eigenvalues: columns must be a multiple of L");
  const CMatrix W = unitary_idft(L);
  CMatrix Ht(E.rows(), E.cols());
  for (Eigen::Index b = 0; b < E.cols() / L; ++b) Ht.middleCols(b * L, L).noalias() = E.middleCols(b * L, L) * W;
  // Entries that are structurally zero come back at rounding level.
  const double tol = 1e-12 * std::max(1.0, Ht.cwiseAbs().maxCoeff());
  return blockwise_gram_eigenvalues(Ht, tol);
}

std::vector<double> blockwise_gram_eigenvalues(const CMatrix& A, double zero_tol) {
  const int rows = static_cast<int>(A.rows()), cols = static_cast<int>(A.cols());
  if (cols == 0) throw InvalidArgument("blockwise_gram_eigenvalues: empty matrix");
  UnionFind uf(cols);
  std::vector<std::vector<int>> row_support(rows);
  for (int r = 0; r < rows; ++r) {
    int first = -1;
    for (int c = 0; c < cols; ++c) {
      if (std::abs(A(r, c)) <= zero_tol) continue;
      row_support[r].push_back(c);
      if (first < 0)
        first = c;
      else
        uf.unite(first, c);
    }
  }
  std::vector<std::vector<int>> comp_cols(cols), comp_rows(cols);
  for (int c = 0; c < cols; ++c) comp_cols[uf.find(c)].push_back(c);
  for (int r = 0; r < rows; ++r)
    if (!row_support[r].empty()) comp_rows[uf.find(row_support[r][0])].push_back(r);

  std::vector<double> out;
  out.reserve(cols);
  for (int root = 0; root < cols; ++root) {
    const auto& cc = comp_cols[root];
    if (cc.empty()) continue;
    const auto& rr = comp_rows[root];
    CMatrix B = CMatrix::Zero(static_cast<Eigen::Index>(rr.size()), static_cast<Eigen::Index>(cc.size()));
    for (std::size_t i = 0; i < rr.size(); ++i)
      for (std::size_t j = 0; j < cc.size(); ++j) {
        const Complex v = A(rr[i], cc[j]);
        if (std::abs(v) > zero_tol) B(i, j) = v;
      }
    const CMatrix G = B.adjoint() * B;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(G, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("blockwise_gram_eigenvalues: eigen solver failed");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::max(es.eigenvalues()(i), 0.0));
  }
  std::sort(out.begin(), out.end());
  return out;
}

double eigen_cdf_compare(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("eigen_cdf_compare: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

}  // namespace lsep
