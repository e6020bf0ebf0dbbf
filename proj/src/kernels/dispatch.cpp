#include <atomic>

#include "lsep/error.hpp"
#include "lsep/kernels/kernels.hpp"

namespace lsep::kernels {
namespace {

// -1: follow detection; otherwise the forced Isa value.
std::atomic<int> g_forced{-1};

bool cpu_has_avx2() {
#if defined(LSEP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return has;
#else
  return false;
#endif
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) { return isa == Isa::Scalar || (isa == Isa::Avx2 && cpu_has_avx2()); }

Isa active_isa() {
  const int f = g_forced.load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Isa>(f);
  return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

void force_isa(std::optional<Isa> isa) {
  if (isa && !isa_available(*isa)) throw InvalidArgument(std::string("kernel variant unavailable: ") + isa_name(*isa));
  g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

SetView view_of(const ConstraintSet& set) {
  const bool psk = set.kind() == SetKind::MPSK;
  return {set.kind(), set.amplitude(), set.order(), psk ? set.root_cos().data() : nullptr,
          psk ? set.root_sin().data() : nullptr};
}

#if defined(LSEP_HAVE_AVX2)
#define LSEP_DISPATCH(isa, name, ...) \
  ((isa) == Isa::Avx2 ? detail::name##_avx2(__VA_ARGS__) : detail::name##_scalar(__VA_ARGS__))
#else
#define LSEP_DISPATCH(isa, name, ...) detail::name##_scalar(__VA_ARGS__)
#endif

void constrained_min_batch(const SetView& set, const double* zr, const double* zi, double c, double* xr,
                           double* xi, std::size_t n, Isa isa) {
  LSEP_DISPATCH(isa, constrained_min, set, zr, zi, c, xr, xi, n);
}

RowMoments rsb_row(const SetView& set, Complex fz, double g, double e, double mu, const double* yr,
                   const double* yi, const double* wy, std::size_t n, double* scratch, Isa isa) {
  return LSEP_DISPATCH(isa, rsb_row, set, fz, g, e, mu, yr, yi, wy, n, scratch);
}

Complex cdotc(const Complex* a, const Complex* b, std::size_t n, Isa isa) { return LSEP_DISPATCH(isa, cdotc, a, b, n); }

void caxpy(Complex alpha, const Complex* x, Complex* y, std::size_t n, Isa isa) {
  LSEP_DISPATCH(isa, caxpy, alpha, x, y, n);
}

void exp_batch(const double* x, double* y, std::size_t n, Isa isa) { LSEP_DISPATCH(isa, exp, x, y, n); }

#undef LSEP_DISPATCH

}  // namespace lsep::kernels
