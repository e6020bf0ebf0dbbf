#include <cmath>

#include "point_ops.hpp"

namespace lsep::kernels::detail {

void constrained_min_scalar(const SetView& s, const double* zr, const double* zi, double c, double* xr, double* xi,
                            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) point_min(s, zr[i], zi[i], c, xr[i], xi[i]);
}

RowMoments rsb_row_scalar(const SetView& s, Complex fz, double g, double e, double mu, const double* yr,
                          const double* yi, const double* wy, std::size_t n, double* scratch) {
  const double fr = fz.real(), fi = fz.imag();
  double top = -INFINITY;
  for (std::size_t j = 0; j < n; ++j) {
    const double wr = fr + g * yr[j];
    const double wi = fi + g * yi[j];
    double xr, xi;
    point_min(s, wr, wi, e, xr, xi);
    const double m = e * (xr * xr + xi * xi) - 2.0 * (xr * wr + xi * wi);
    scratch[j] = -mu * m;
    top = std::max(top, scratch[j]);
  }
  double s0 = 0.0, sxr = 0.0, sxi = 0.0, sp = 0.0, sy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double wr = fr + g * yr[j];
    const double wi = fi + g * yi[j];
    double xr, xi;
    point_min(s, wr, wi, e, xr, xi);
    const double y = wy[j] * std::exp(scratch[j] - top);
    s0 += y;
    sxr += y * xr;
    sxi += y * xi;
    sp += y * (xr * xr + xi * xi);
    sy += y * (yr[j] * xr + yi[j] * xi);
  }
  return {std::log(s0) + top, Complex(sxr / s0, sxi / s0), sp / s0, sy / s0};
}

Complex cdotc_scalar(const Complex* a, const Complex* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

void caxpy_scalar(Complex alpha, const Complex* x, Complex* y, std::size_t n) {
  const double p = alpha.real(), q = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = Complex(y[i].real() + (p * xr - q * xi), y[i].imag() + (p * xi + q * xr));
  }
}

void exp_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(x[i]);
}

}  // namespace lsep::kernels::detail
