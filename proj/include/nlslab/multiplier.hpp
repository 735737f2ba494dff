#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "nlslab/field.hpp"

namespace nlslab {

namespace detail {
inline std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

// C-infinity step based on theta(s) = exp(-1/s): 0 for s <= 0, 1 for
// s >= 1, and theta(s)/(theta(s)+theta(1-s)) in between.  Evaluated as
// 1/(1+e^E) with E = 1/s - 1/(1-s), which is stable where theta underflows.
inline double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double E = 1.0 / s - 1.0 / (1.0 - s);
  if (E > 700.0) return 0.0;
  if (E < -700.0) return 1.0;
  return 1.0 / (1.0 + std::exp(E));
}

// d/ds smooth_step = -E'(s) p (1-p) with p = smooth_step(s).
inline double smooth_step_d1(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double E = 1.0 / s - 1.0 / (1.0 - s);
  if (std::fabs(E) > 700.0) return 0.0;
  const double p = 1.0 / (1.0 + std::exp(E));
  const double q = 1.0 - p;
  const double dE = -1.0 / (s * s) - 1.0 / ((1.0 - s) * (1.0 - s));
  return -dE * p * q;
}

// d2/ds2 smooth_step = -p (1-p) [E'' + E'^2 (p - (1-p))].
inline double smooth_step_d2(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double E = 1.0 / s - 1.0 / (1.0 - s);
  if (std::fabs(E) > 700.0) return 0.0;
  const double p = 1.0 / (1.0 + std::exp(E));
  const double q = 1.0 - p;
  const double dE = -1.0 / (s * s) - 1.0 / ((1.0 - s) * (1.0 - s));
  const double ddE = 2.0 / (s * s * s) - 2.0 / ((1.0 - s) * (1.0 - s) * (1.0 - s));
  return -p * q * (ddE + dE * dE * (p - q));
}

// m_{<=1}: smooth, even, 1 on |s| <= 1, 0 on |s| >= 2.
inline double low_pass_profile(double s) { return smooth_step(2.0 - std::fabs(s)); }

// A real or unit-modulus Fourier symbol xi -> m(xi) with a descriptive name.
struct MultiplierSymbol {
  std::string name;
  std::function<std::complex<double>(double)> eval;
};

inline MultiplierSymbol low_pass_symbol(double N) {
  if (!(N > 0.0)) throw config_error("low-pass cutoff N must be positive");
  return {"low-pass(N=" + detail::fmt_double(N) + ")", [N](double xi) {
            return std::complex<double>(low_pass_profile(xi / N), 0.0);
          }};
}

// band symbol m(xi/N) - m(2 xi/N), the dyadic difference of low passes
inline MultiplierSymbol band_symbol(double N) {
  if (!(N > 0.0)) throw config_error("band cutoff N must be positive");
  return {"band(N=" + detail::fmt_double(N) + ")", [N](double xi) {
            return std::complex<double>(
                low_pass_profile(xi / N) - low_pass_profile(2.0 * xi / N), 0.0);
          }};
}

// free Schroedinger propagator phase e^{-i xi^2 t}
inline MultiplierSymbol free_phase_symbol(double t) {
  return {"free-phase(t=" + detail::fmt_double(t) + ")", [t](double xi) {
            return std::exp(std::complex<double>(0.0, -xi * xi * t));
          }};
}

// |grad|^{-1/2}: symbol |xi|^{-1/2}; the zero mode takes the value at the
// smallest nonzero lattice frequency 2*pi/L so the symbol stays bounded.
inline MultiplierSymbol inv_sqrt_grad_symbol(double L) {
  if (!(L > 0.0)) throw config_error("inv_sqrt_grad_symbol: L must be positive");
  const double xi0 = 2.0 * std::numbers::pi / L;
  return {"inv-sqrt-grad", [xi0](double xi) {
            const double a = std::fabs(xi);
            return std::complex<double>(1.0 / std::sqrt(a > 0.0 ? a : xi0), 0.0);
          }};
}

// Multiply spectral coefficient k by m(xi_k).  Output is spectral.
inline ComplexField apply_symbol(const ComplexField& f, const MultiplierSymbol& m) {
  if (!f.finite()) throw numeric_error("apply_symbol: input contains NaN/Inf");
  ComplexField out = as_spectral(f);
  for (std::size_t j = 0; j < out.grid.M; ++j) {
    const std::complex<double> v = m.eval(out.grid.xi(j));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw numeric_error("apply_symbol: symbol '" + m.name + "' is not finite at xi=" +
                          detail::fmt_double(out.grid.xi(j)));
    out.values[j] *= v;
  }
  return out;
}

enum class LpKind { low, band };

// Littlewood-Paley projection: kind=low applies m(xi/N); kind=band applies
// m(xi/N) - m(2 xi/N), the difference P_{<=N} - P_{<=N/2}.
inline ComplexField lp_project(const ComplexField& f, double N, LpKind kind) {
  if (!(N > 0.0)) throw config_error("lp_project: N must be positive");
  return apply_symbol(f, kind == LpKind::low ? low_pass_symbol(N) : band_symbol(N));
}

// e^{it Delta}: coefficient k multiplied by exp(-i xi_k^2 t).  The input
// representation is preserved.
inline ComplexField free_evolve(const ComplexField& f, double t) {
  const Rep orig = f.rep;
  ComplexField out = apply_symbol(f, free_phase_symbol(t));
  return orig == Rep::physical ? as_physical(out) : out;
}

}  // namespace nlslab
