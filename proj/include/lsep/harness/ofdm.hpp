#pragma once

#include <vector>

#include "lsep/types.hpp"

namespace lsep {

/// Unitary inverse DFT of size L: W[m, n] = exp(j 2 pi m n / L) / sqrt(L).
CMatrix unitary_idft(int L);

/// Subcarrier-interleaved stacking: for the k-th of L matrices (K x N),
/// H_t[(k-1)K + r, (i-1)L + k] = H_k[r, i] (1-based).
CMatrix ofdm_stacked_channel(const std::vector<CMatrix>& H_list);

/// Equivalent frequency-flat channel H_t W_t^H (KL x NL), with W_t
/// block-diagonal in L x L copies of the unitary IDFT.
CMatrix ofdm_equivalent_channel(const std::vector<CMatrix>& H_list);

/// max |W_t W_t^H - I| for block size L.
double ofdm_unitarity_residual(int L);

/// Eigenvalues of E^H E for E = ofdm_equivalent_channel(H_list). Since W_t is
/// unitary they equal the eigenvalues of H_t^H H_t, which splits into
/// independent blocks (connected column groups of H_t); each block is
/// diagonalized separately. Sorted ascending.
std::vector<double> ofdm_gram_eigenvalues(const CMatrix& E, int L);

/// Eigenvalues of a Hermitian matrix A^H A, decomposed over the connected
/// components of A's column interaction graph. Sorted ascending.
std::vector<double> blockwise_gram_eigenvalues(const CMatrix& A, double zero_tol = 0.0);

/// Kolmogorov-Smirnov distance between the empirical CDFs of two samples.
double eigen_cdf_compare(std::vector<double> a, std::vector<double> b);

}  // namespace lsep
