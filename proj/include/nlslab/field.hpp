#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "nlslab/errors.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/grid.hpp"

namespace nlslab {

enum class Rep { physical, spectral };
enum class Direction { to_spectral, to_physical };

// One time slice of u on a Grid, held either as physical samples u(x_m)
// or as spectral coefficients of the unitary DFT (frequencies in the
// grid's DFT storage order).
struct ComplexField {
  Grid grid;
  Rep rep = Rep::physical;
  std::vector<std::complex<double>> values;

  static ComplexField zero(const Grid& g, Rep r = Rep::physical) {
    return ComplexField{g, r, std::vector<std::complex<double>>(g.M)};
  }

  bool finite() const {
    for (const auto& v : values)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }
};

inline ComplexField transform(const ComplexField& f, Direction dir) {
  if (f.values.size() != f.grid.M)
    throw internal_error("field sample count does not match grid");
  if (!f.finite()) throw numeric_error("transform: input contains NaN/Inf");
  if (dir == Direction::to_spectral && f.rep != Rep::physical)
    throw config_error("transform to_spectral expects a physical field");
  if (dir == Direction::to_physical && f.rep != Rep::spectral)
    throw config_error("transform to_physical expects a spectral field");
  ComplexField out = f;
  if (dir == Direction::to_spectral) {
    detail::FftPlans::instance().forward(out.values.data(), out.grid.M);
    out.rep = Rep::spectral;
  } else {
    detail::FftPlans::instance().backward(out.values.data(), out.grid.M);
    out.rep = Rep::physical;
  }
  return out;
}

inline ComplexField as_physical(const ComplexField& f) {
  return f.rep == Rep::physical ? f : transform(f, Direction::to_physical);
}

inline ComplexField as_spectral(const ComplexField& f) {
  return f.rep == Rep::spectral ? f : transform(f, Direction::to_spectral);
}

// <l, u> = dx * sum_m conj(l_m) u_m.  Conjugate-linear in the first slot,
// so <l, l> equals the mass of l.  By unitarity the same value is obtained
// from spectral coefficients, so mixed representations are reconciled
// without bias.
inline std::complex<double> pairing(const ComplexField& l, const ComplexField& u) {
  if (!(l.grid == u.grid))
    throw config_error("pairing: fields live on different grids");
  const ComplexField* a = &l;
  const ComplexField* b = &u;
  ComplexField tmp;
  if (l.rep != u.rep) {
    tmp = as_physical(u);
    if (l.rep != Rep::physical) {
      tmp = as_physical(l);
      a = &tmp;
      b = &u;
    } else {
      b = &tmp;
    }
  }
  std::complex<double> acc = 0.0;
  for (std::size_t m = 0; m < a->grid.M; ++m)
    acc += std::conj(a->values[m]) * b->values[m];
  return acc * l.grid.dx();
}

// omega(u, v) = Im( dx * sum_m u_m conj(v_m) ), the standard symplectic
// form; equals Im pairing(v, u).
inline double symplectic_form(const ComplexField& u, const ComplexField& v) {
  if (!(u.grid == v.grid))
    throw config_error("symplectic_form: fields live on different grids");
  ComplexField uc, vc;
  const ComplexField* up = &u;
  const ComplexField* vp = &v;
  if (u.rep != v.rep) {
    uc = as_physical(u);
    vc = as_physical(v);
    up = &uc;
    vp = &vc;
  }
  double acc = 0.0;
  for (std::size_t m = 0; m < u.grid.M; ++m)
    acc += (up->values[m] * std::conj(vp->values[m])).imag();
  return acc * u.grid.dx();
}

}  // namespace nlslab
