// AVX2/FMA variants. Only the functions below the target pragma use the
// extended instruction set; shared inline helpers keep the baseline ISA so the
// linker never folds a vector-encoded copy into scalar code. Reached only
// after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "point_ops.hpp"

#if defined(__clang__)
#pragma clang attribute push(__attribute__((target("avx2,fma"))), apply_to = function)
#else
#pragma GCC push_options
#pragma GCC target("avx2,fma")
#endif

namespace lsep::kernels::detail {
namespace {

inline __m256d exp4(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  // Cody-Waite split of ln 2.
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);
  // Taylor polynomial to degree 13 on |r| <= ln(2)/2.
  static constexpr double c[14] = {1.0,
                                   1.0,
                                   1.0 / 2,
                                   1.0 / 6,
                                   1.0 / 24,
                                   1.0 / 120,
                                   1.0 / 720,
                                   1.0 / 5040,
                                   1.0 / 40320,
                                   1.0 / 362880,
                                   1.0 / 3628800,
                                   1.0 / 39916800,
                                   1.0 / 479001600,
                                   1.0 / 6227020800};
  __m256d p = _mm256_set1_pd(c[13]);
  for (int k = 12; k >= 0; --k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[k]));
  const __m128i ni = _mm256_cvtpd_epi32(n);
  const __m256i e = _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(ni), _mm256_set1_epi64x(1023)), 52);
  const __m256d out = _mm256_mul_pd(p, _mm256_castsi256_pd(e));
  return _mm256_andnot_pd(underflow, out);
}

inline double hsum(__m256d v) {
  const __m128d a = _mm256_castpd256_pd128(v);
  const __m128d b = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(a, b);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Four argmins at once; same operation order as point_min.
inline void point_min4(const SetView& s, __m256d wr, __m256d wi, __m256d c, __m256d& xr, __m256d& xi) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d A = _mm256_set1_pd(s.amplitude);
  switch (s.kind) {
    case SetKind::Unconstrained:
      xr = _mm256_div_pd(wr, c);
      xi = _mm256_div_pd(wi, c);
      return;
    case SetKind::Disk: {
      const __m256d r = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(wr, wr), _mm256_mul_pd(wi, wi)));
      const __m256d is0 = _mm256_cmp_pd(r, zero, _CMP_EQ_OQ);
      const __m256d rs = _mm256_blendv_pd(r, _mm256_set1_pd(1.0), is0);
      const __m256d mag = _mm256_min_pd(A, _mm256_div_pd(r, c));
      const __m256d f = _mm256_blendv_pd(_mm256_div_pd(mag, rs), zero, is0);
      xr = _mm256_mul_pd(wr, f);
      xi = _mm256_mul_pd(wi, f);
      return;
    }
    case SetKind::Circle: {
      const __m256d r = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(wr, wr), _mm256_mul_pd(wi, wi)));
      const __m256d is0 = _mm256_cmp_pd(r, zero, _CMP_EQ_OQ);
      const __m256d rs = _mm256_blendv_pd(r, _mm256_set1_pd(1.0), is0);
      const __m256d f = _mm256_div_pd(A, rs);
      xr = _mm256_blendv_pd(_mm256_mul_pd(wr, f), A, is0);
      xi = _mm256_blendv_pd(_mm256_mul_pd(wi, f), zero, is0);
      return;
    }
    case SetKind::MPSK: {
      __m256d bc = _mm256_set1_pd(s.root_cos[0]);
      __m256d bs = _mm256_set1_pd(s.root_sin[0]);
      __m256d best = _mm256_add_pd(_mm256_mul_pd(wr, bc), _mm256_mul_pd(wi, bs));
      for (int k = 1; k < s.order; ++k) {
        const __m256d ck = _mm256_set1_pd(s.root_cos[k]);
        const __m256d sk = _mm256_set1_pd(s.root_sin[k]);
        const __m256d sc = _mm256_add_pd(_mm256_mul_pd(wr, ck), _mm256_mul_pd(wi, sk));
        const __m256d gt = _mm256_cmp_pd(sc, best, _CMP_GT_OQ);
        best = _mm256_blendv_pd(best, sc, gt);
        bc = _mm256_blendv_pd(bc, ck, gt);
        bs = _mm256_blendv_pd(bs, sk, gt);
      }
      xr = _mm256_mul_pd(A, bc);
      xi = _mm256_mul_pd(A, bs);
      return;
    }
  }
}

bool vectorizable(const SetView& s) { return s.kind != SetKind::MPSK || s.order <= kMaxScoredOrder; }

}  // namespace

void constrained_min_avx2(const SetView& s, const double* zr, const double* zi, double c, double* xr, double* xi,
                          std::size_t n) {
  if (!vectorizable(s)) return constrained_min_scalar(s, zr, zi, c, xr, xi, n);
  const __m256d cv = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d a = _mm256_setzero_pd(), b = a;
    point_min4(s, _mm256_loadu_pd(zr + i), _mm256_loadu_pd(zi + i), cv, a, b);
    _mm256_storeu_pd(xr + i, a);
    _mm256_storeu_pd(xi + i, b);
  }
  for (; i < n; ++i) point_min(s, zr[i], zi[i], c, xr[i], xi[i]);
}

RowMoments rsb_row_avx2(const SetView& s, Complex fz, double g, double e, double mu, const double* yr,
                        const double* yi, const double* wy, std::size_t n, double* scratch) {
  if (!vectorizable(s)) return rsb_row_scalar(s, fz, g, e, mu, yr, yi, wy, n, scratch);
  const double fr = fz.real(), fi = fz.imag();
  const __m256d vfr = _mm256_set1_pd(fr), vfi = _mm256_set1_pd(fi);
  const __m256d vg = _mm256_set1_pd(g), ve = _mm256_set1_pd(e);
  const __m256d vnmu = _mm256_set1_pd(-mu), two = _mm256_set1_pd(2.0);

  __m256d vtop = _mm256_set1_pd(-INFINITY);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d wr = _mm256_add_pd(vfr, _mm256_mul_pd(vg, _mm256_loadu_pd(yr + j)));
    const __m256d wi = _mm256_add_pd(vfi, _mm256_mul_pd(vg, _mm256_loadu_pd(yi + j)));
    __m256d xr = _mm256_setzero_pd(), xi = xr;
    point_min4(s, wr, wi, ve, xr, xi);
    const __m256d nrm = _mm256_add_pd(_mm256_mul_pd(xr, xr), _mm256_mul_pd(xi, xi));
    const __m256d dot = _mm256_add_pd(_mm256_mul_pd(xr, wr), _mm256_mul_pd(xi, wi));
    const __m256d lm = _mm256_mul_pd(vnmu, _mm256_sub_pd(_mm256_mul_pd(ve, nrm), _mm256_mul_pd(two, dot)));
    _mm256_storeu_pd(scratch + j, lm);
    vtop = _mm256_max_pd(vtop, lm);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vtop);
  double top = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (std::size_t t = j; t < n; ++t) {
    const double wr = fr + g * yr[t];
    const double wi = fi + g * yi[t];
    double xr = 0.0, xi = 0.0;
    point_min(s, wr, wi, e, xr, xi);
    scratch[t] = -mu * (e * (xr * xr + xi * xi) - 2.0 * (xr * wr + xi * wi));
    top = std::max(top, scratch[t]);
  }

  const __m256d vt = _mm256_set1_pd(top);
  __m256d s0 = _mm256_setzero_pd(), sxr = s0, sxi = s0, sp = s0, sy = s0;
  j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d y_r = _mm256_loadu_pd(yr + j), y_i = _mm256_loadu_pd(yi + j);
    const __m256d wr = _mm256_add_pd(vfr, _mm256_mul_pd(vg, y_r));
    const __m256d wi = _mm256_add_pd(vfi, _mm256_mul_pd(vg, y_i));
    __m256d xr = _mm256_setzero_pd(), xi = xr;
    point_min4(s, wr, wi, ve, xr, xi);
    const __m256d y = _mm256_mul_pd(_mm256_loadu_pd(wy + j), exp4(_mm256_sub_pd(_mm256_loadu_pd(scratch + j), vt)));
    s0 = _mm256_add_pd(s0, y);
    sxr = _mm256_fmadd_pd(y, xr, sxr);
    sxi = _mm256_fmadd_pd(y, xi, sxi);
    sp = _mm256_fmadd_pd(y, _mm256_add_pd(_mm256_mul_pd(xr, xr), _mm256_mul_pd(xi, xi)), sp);
    sy = _mm256_fmadd_pd(y, _mm256_add_pd(_mm256_mul_pd(y_r, xr), _mm256_mul_pd(y_i, xi)), sy);
  }
  double a0 = hsum(s0), axr = hsum(sxr), axi = hsum(sxi), ap = hsum(sp), ay = hsum(sy);
  for (; j < n; ++j) {
    const double wr = fr + g * yr[j];
    const double wi = fi + g * yi[j];
    double xr = 0.0, xi = 0.0;
    point_min(s, wr, wi, e, xr, xi);
    const double y = wy[j] * std::exp(scratch[j] - top);
    a0 += y;
    axr += y * xr;
    axi += y * xi;
    ap += y * (xr * xr + xi * xi);
    ay += y * (yr[j] * xr + yi[j] * xi);
  }
  return {std::log(a0) + top, Complex(axr / a0, axi / a0), ap / a0, ay / a0};
}

Complex cdotc_avx2(const Complex* a, const Complex* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);                              // ar br, ai bi
    acc_im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), acc_im);  // ar bi, ai br
  }
  alignas(32) double im[4];
  _mm256_store_pd(im, acc_im);
  double re = hsum(acc_re);
  double imag = (im[0] - im[1]) + (im[2] - im[3]);
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    imag += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, imag};
}

void caxpy_avx2(Complex alpha, const Complex* x, Complex* y, std::size_t n) {
  const double* px = reinterpret_cast<const double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d p = _mm256_set1_pd(alpha.real());
  const __m256d q = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(px + 2 * i);
    const __m256d vy = _mm256_loadu_pd(py + 2 * i);
    const __m256d swapped = _mm256_permute_pd(vx, 0b0101);  // xi, xr
    const __m256d out = _mm256_addsub_pd(_mm256_fmadd_pd(p, vx, vy), _mm256_mul_pd(q, swapped));
    _mm256_storeu_pd(py + 2 * i, out);
  }
  if (i < n) caxpy_scalar(alpha, x + i, y + i, n - i);
}

void exp_avx2(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, exp4(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = std::exp(x[i]);
}

}  // namespace lsep::kernels::detail

#if defined(__clang__)
#pragma clang attribute pop
#else
#pragma GCC pop_options
#endif
