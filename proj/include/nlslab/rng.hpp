#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include "nlslab/field.hpp"

namespace nlslab {

// Deterministic normals from a seeded mt19937_64, via Box-Muller on 53-bit
// uniforms.  Avoids std::normal_distribution, whose stream is
// implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : eng_(seed) {}

  // uniform in (0, 1]
  double uniform() { return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53; }

  double normal() {
    const double u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

  std::complex<double> cnormal() { return {normal(), normal()}; }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// derive a per-member seed from an experiment seed and an index
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Random field with i.i.d. complex Gaussian spectral coefficients on
// |xi| <= band and zero outside, scaled so that ||f||_2 equals target_l2.
inline ComplexField random_band_limited(const Grid& g, double band,
                                        double target_l2, SeededRng& rng) {
  if (!(band > 0.0)) throw config_error("random_band_limited: band must be positive");
  ComplexField f = ComplexField::zero(g, Rep::spectral);
  for (std::size_t j = 0; j < g.M; ++j)
    if (std::fabs(g.xi(j)) <= band) f.values[j] = rng.cnormal();
  double sq = 0.0;
  for (const auto& v : f.values) sq += std::norm(v);
  sq *= g.dx();
  if (sq > 0.0 && target_l2 > 0.0) {
    const double s = target_l2 / std::sqrt(sq);
    for (auto& v : f.values) v *= s;
  } else {
    for (auto& v : f.values) v = 0.0;
  }
  return f;
}

}  // namespace nlslab
