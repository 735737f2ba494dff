#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "nlslab/errors.hpp"

namespace nlslab {

// Uniform periodic grid on [0, L): M points, spacing dx = L/M.
//
// The frequency lattice is xi_k = 2*pi*k/L for integer k in [-M/2, M/2),
// stored in DFT order: storage index j corresponds to k = j for j < M/2
// and k = j - M otherwise (so j = M/2 is the Nyquist mode k = -M/2).
struct Grid {
  double L = 0.0;
  std::size_t M = 0;

  double dx() const { return L / static_cast<double>(M); }
  double x(std::size_t m) const { return static_cast<double>(m) * dx(); }

  long mode(std::size_t j) const {
    return j < M / 2 ? static_cast<long>(j)
                     : static_cast<long>(j) - static_cast<long>(M);
  }
  double xi(std::size_t j) const {
    return 2.0 * std::numbers::pi * static_cast<double>(mode(j)) / L;
  }
  // largest |xi| on the lattice (attained at the Nyquist mode)
  double xi_max() const { return std::numbers::pi * static_cast<double>(M) / L; }

  // shortest periodic distance between positions a and b
  double dist(double a, double b) const {
    double d = std::fmod(std::fabs(a - b), L);
    return std::min(d, L - d);
  }

  bool operator==(const Grid&) const = default;
};

inline bool is_pow2(std::size_t m) { return m != 0 && (m & (m - 1)) == 0; }

inline std::size_t next_pow2(std::size_t m) {
  std::size_t p = 1;
  while (p < m) p <<= 1;
  return p;
}

inline Grid make_grid(double L, std::size_t M) {
  if (!(L > 0.0) || !std::isfinite(L))
    throw config_error("grid.circumference must be positive and finite");
  if (M < 8 || !is_pow2(M))
    throw config_error("grid.points must be a power of two >= 8, got " +
                       std::to_string(M));
  return Grid{L, M};
}

}  // namespace nlslab
