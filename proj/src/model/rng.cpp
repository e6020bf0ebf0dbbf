#include "lsep/model/rng.hpp"

#include <cmath>

namespace lsep {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

Complex complex_normal(Rng& rng, double variance) {
  std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

}  // namespace lsep
