#pragma once

#include <cstddef>
#include <optional>

#include "lsep/model/constraint_set.hpp"
#include "lsep/types.hpp"

namespace lsep::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
/// True if the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa);
/// Best available variant, honouring force_isa().
Isa active_isa();
/// Pins dispatch to one variant (tests); nullopt restores detection.
/// Throws InvalidArgument if the variant is unavailable.
void force_isa(std::optional<Isa> isa);

/// Plain view of a ConstraintSet for the batched kernels.
struct SetView {
  SetKind kind;
  double amplitude;
  int order;
  const double* root_cos;
  const double* root_sin;
};
SetView view_of(const ConstraintSet& set);

/// x[i] = argmin over the set of |z[i] - c x|, c > 0. Same tie rules as
/// scalar_constrained_min.
void constrained_min_batch(const SetView& set, const double* zr, const double* zi, double c, double* xr,
                           double* xi, std::size_t n, Isa isa);

/// Weighted sums over an inner Gaussian rule for one outer node of the
/// two-level integral. With w_j = fz + g y_j, xh_j = argmin |w_j - e x|,
/// m_j = e |xh_j|^2 - 2 Re(conj(xh_j) w_j) and Y_j = exp(-mu m_j):
///   log_z  = log sum_j wy_j Y_j
///   mean_x = sum_j wy_j Y_j xh_j / sum_j wy_j Y_j       (complex)
///   mean_p = sum_j wy_j Y_j |xh_j|^2 / sum_j wy_j Y_j
///   mean_y = sum_j wy_j Y_j Re(conj(y_j) xh_j) / sum_j wy_j Y_j
struct RowMoments {
  double log_z;
  Complex mean_x;
  double mean_p;
  double mean_y;
};
/// `scratch` must hold n doubles.
RowMoments rsb_row(const SetView& set, Complex fz, double g, double e, double mu, const double* yr,
                   const double* yi, const double* wy, std::size_t n, double* scratch, Isa isa);

/// sum_i conj(a_i) b_i.
Complex cdotc(const Complex* a, const Complex* b, std::size_t n, Isa isa);
/// y += alpha x.
void caxpy(Complex alpha, const Complex* x, Complex* y, std::size_t n, Isa isa);

/// exp over an array (the AVX2 variant uses its own polynomial kernel).
void exp_batch(const double* x, double* y, std::size_t n, Isa isa);

inline void constrained_min_batch(const SetView& s, const double* zr, const double* zi, double c, double* xr,
                                  double* xi, std::size_t n) {
  constrained_min_batch(s, zr, zi, c, xr, xi, n, active_isa());
}
inline Complex cdotc(const Complex* a, const Complex* b, std::size_t n) { return cdotc(a, b, n, active_isa()); }
inline void caxpy(Complex alpha, const Complex* x, Complex* y, std::size_t n) { caxpy(alpha, x, y, n, active_isa()); }

namespace detail {
// Per-variant entry points; the AVX2 ones exist only when compiled in.
void constrained_min_scalar(const SetView&, const double*, const double*, double, double*, double*, std::size_t);
RowMoments rsb_row_scalar(const SetView&, Complex, double, double, double, const double*, const double*,
                          const double*, std::size_t, double*);
Complex cdotc_scalar(const Complex*, const Complex*, std::size_t);
void caxpy_scalar(Complex, const Complex*, Complex*, std::size_t);
void exp_scalar(const double*, double*, std::size_t);

void constrained_min_avx2(const SetView&, const double*, const double*, double, double*, double*, std::size_t);
RowMoments rsb_row_avx2(const SetView&, Complex, double, double, double, const double*, const double*,
                        const double*, std::size_t, double*);
Complex cdotc_avx2(const Complex*, const Complex*, std::size_t);
void caxpy_avx2(Complex, const Complex*, Complex*, std::size_t);
void exp_avx2(const double*, double*, std::size_t);
}  // namespace detail

}  // namespace lsep::kernels
