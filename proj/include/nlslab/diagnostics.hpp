#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nlslab/cutoffs.hpp"
#include "nlslab/dynamics.hpp"
#include "nlslab/field.hpp"
#include "nlslab/multiplier.hpp"
#include "nlslab/rng.hpp"

namespace nlslab {

// mass = integral |u|^2 dx = dx * sum |u_m|^2 (same value in either
// representation by unitarity)
inline double mass(const ComplexField& f) {
  if (!f.finite()) throw numeric_error("mass: input contains NaN/Inf");
  double acc = 0.0;
  for (const auto& v : f.values) acc += std::norm(v);
  return acc * f.grid.dx();
}

inline double l2_norm(const ComplexField& f) { return std::sqrt(mass(f)); }

inline double sup_norm(const ComplexField& f) {
  const ComplexField p = as_physical(f);
  double mx = 0.0;
  for (const auto& v : p.values) mx = std::max(mx, std::abs(v));
  return mx;
}

// E(u) = integral 1/2 |grad u|^2 + coupling * sigma/4 |P u|^4 dx, with the
// gradient taken spectrally and P, sigma, coupling from the configuration.
inline double energy(const ComplexField& f, const SolverConfig& cfg) {
  const ComplexField hat = as_spectral(f);
  const Grid& g = f.grid;
  double kin = 0.0;
  for (std::size_t j = 0; j < g.M; ++j)
    kin += g.xi(j) * g.xi(j) * std::norm(hat.values[j]);
  kin *= 0.5 * g.dx();
  ComplexField p = cfg.truncated()
                       ? as_physical(apply_symbol(hat, low_pass_symbol(cfg.N)))
                       : as_physical(f);
  double quart = 0.0;
  for (const auto& v : p.values) quart += std::norm(v) * std::norm(v);
  quart *= 0.25 * g.dx() * static_cast<double>(static_cast<int>(cfg.sign)) * cfg.coupling;
  return kin + quart;
}

// Named scalars produced by the `norms` entry point.
struct NormReport {
  double T = 0.0, R = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double s_norm = 0.0;
  double l6_norm = 0.0;
  double local_smoothing_ratio = 0.0;
  double tilde_s_norm = 0.0;
};

namespace detail {

// indices of snapshots with time inside [t1, t2] (half-spacing tolerance)
inline std::vector<std::size_t> window_indices(const Trajectory& traj, double t1,
                                               double t2) {
  std::vector<std::size_t> idx;
  const double eps =
      1e-9 * std::max({1.0, std::fabs(t1), std::fabs(t2), traj.spacing});
  for (std::size_t s = 0; s < traj.size(); ++s) {
    const double t = traj.time(s);
    if (t >= t1 - eps && t <= t2 + eps) idx.push_back(s);
  }
  return idx;
}

// mask of grid points with periodic distance to x=0 at most R
inline std::vector<char> spatial_mask(const Grid& g, double R) {
  std::vector<char> mask(g.M, 1);
  if (R >= g.L / 2.0) return mask;
  for (std::size_t m = 0; m < g.M; ++m)
    mask[m] = g.dist(g.x(m), 0.0) <= R + 1e-12 ? 1 : 0;
  return mask;
}

}  // namespace detail

// Discrete Strichartz norm over the snapshots in [t1, t2]:
//   max_s ||u(t_s)||_2 + ( sum_s dt ||u(t_s)||_inf^4 )^{1/4}.
inline double strichartz_norm(const Trajectory& traj, double t1, double t2) {
  const auto idx = detail::window_indices(traj, t1, t2);
  if (idx.size() < 2)
    throw config_error("strichartz_norm: window holds fewer than 2 snapshots");
  double c_l2 = 0.0, l4 = 0.0;
  for (std::size_t s : idx) {
    c_l2 = std::max(c_l2, l2_norm(traj.fields[s]));
    const double si = sup_norm(traj.fields[s]);
    l4 += traj.spacing * si * si * si * si;
  }
  return c_l2 + std::pow(l4, 0.25);
}

// Mixed L^q_t L^r_x norm by rectangle rule in time and exact sums in
// space, restricted to times [t1, t2] and the spatial window of periodic
// radius R about x=0 (R >= L/2 means no restriction).
inline double spacetime_lp_norm(const Trajectory& traj, double q, double r,
                                double t1, double t2, double R) {
  if (!(q > 0.0) || !(r > 0.0)) throw config_error("spacetime_lp_norm: p must be positive");
  const auto idx = detail::window_indices(traj, t1, t2);
  if (idx.empty()) throw config_error("spacetime_lp_norm: empty time window");
  const auto mask = detail::spatial_mask(traj.grid, R);
  const double dx = traj.grid.dx();
  double acc_t = 0.0;
  double max_t = 0.0;
  for (std::size_t s : idx) {
    const ComplexField p = as_physical(traj.fields[s]);
    double acc_x = 0.0;
    for (std::size_t m = 0; m < p.values.size(); ++m)
      if (mask[m]) acc_x += std::pow(std::abs(p.values[m]), r);
    const double lr = std::pow(acc_x * dx, 1.0 / r);
    acc_t += traj.spacing * std::pow(lr, q);
    max_t = std::max(max_t, lr);
  }
  if (std::isinf(q)) return max_t;
  return std::pow(acc_t, 1.0 / q);
}

inline double spacetime_lp_norm(const Trajectory& traj, double q, double r,
                                double t1, double t2) {
  return spacetime_lp_norm(traj, q, r, t1, t2, traj.grid.L);
}

// ||u||_{L^2_{t,x}([t0,tend] x [-R,R])} divided by
// R^{1/2} ( |||grad|^{-1/2} u(0)||_2 + sum_s dt |||grad|^{-1/2} G(t_s)||_2 )
// with G = P F(P u) recovered from the trajectory's configuration.
inline double local_smoothing_ratio(const Trajectory& traj, double R) {
  if (!(R > 0.0)) throw config_error("local_smoothing_ratio: R must be positive");
  if (R > traj.grid.L / 2.0)
    throw config_error("local_smoothing_ratio: R exceeds half the grid circumference");
  if (traj.size() < 2) throw config_error("local_smoothing_ratio: need >= 2 snapshots");
  const double lhs = spacetime_lp_norm(traj, 2.0, 2.0, traj.t0, traj.t_end(), R);
  const MultiplierSymbol half = inv_sqrt_grad_symbol(traj.grid.L);
  double rhs = l2_norm(apply_symbol(traj.fields.front(), half));
  for (std::size_t s = 0; s < traj.size(); ++s) {
    const ComplexField G = nonlinear_term(traj.fields[s], traj.config);
    rhs += traj.spacing * l2_norm(apply_symbol(G, half));
  }
  rhs *= std::sqrt(R);
  if (rhs == 0.0) return 0.0;
  return lhs / rhs;
}

// ||u||_{tilde S} = ||u||_{L^inf_t L^2_x} + ||(i d_t + Delta) u||_{L^2_{t,x}}
// over the trajectory's span, the second term evaluated as P F(P u) on
// snapshots (rectangle rule).
inline double tilde_s_norm(const Trajectory& traj) {
  if (traj.size() < 2) throw config_error("tilde_s_norm: need >= 2 snapshots");
  double linf = 0.0, l2tx = 0.0;
  for (std::size_t s = 0; s < traj.size(); ++s) {
    linf = std::max(linf, l2_norm(traj.fields[s]));
    const double g = l2_norm(nonlinear_term(traj.fields[s], traj.config));
    l2tx += traj.spacing * g * g;
  }
  return linf + std::sqrt(l2tx);
}

// Discrete ||u(t+tau, x+y) - u(t, x)||_{L^2([-T,T]x[-R,R])}.  The spatial
// shift is a spectral modulation (exact for off-grid y); the temporal
// shift takes the nearest snapshot, and the snapshot spacing must resolve
// tau to a tenth.
inline double equicontinuity_modulus(const Trajectory& traj, double tau, double y,
                                     double R, double T) {
  if (traj.size() < 2) throw config_error("equicontinuity_modulus: need >= 2 snapshots");
  if (std::fabs(tau) > 0.0 && traj.spacing > std::fabs(tau) / 10.0 + 1e-15)
    throw config_error("equicontinuity_modulus: snapshot spacing exceeds tau/10");
  const double need_lo = -T + std::min(0.0, tau);
  const double need_hi = T + std::max(0.0, tau);
  if (traj.t0 > need_lo + 1e-12 || traj.t_end() < need_hi - 1e-12)
    throw config_error("equicontinuity_modulus: trajectory does not cover [-T-|tau|, T+|tau|]");
  const auto idx = detail::window_indices(traj, -T, T);
  if (idx.empty()) throw config_error("equicontinuity_modulus: empty window");
  const auto mask = detail::spatial_mask(traj.grid, R);
  const Grid& g = traj.grid;
  const long long shift = std::llround(tau / traj.spacing);
  double acc = 0.0;
  for (std::size_t s : idx) {
    const long long s2 = static_cast<long long>(s) + shift;
    if (s2 < 0 || s2 >= static_cast<long long>(traj.size()))
      throw config_error("equicontinuity_modulus: shifted snapshot out of range");
    ComplexField a = traj.fields[static_cast<std::size_t>(s2)];
    if (y != 0.0) {
      a = as_spectral(a);
      for (std::size_t j = 0; j < g.M; ++j)
        a.values[j] *= std::exp(std::complex<double>(0.0, g.xi(j) * y));
      a = as_physical(a);
    }
    const ComplexField& b = traj.fields[s];
    double acc_x = 0.0;
    for (std::size_t m = 0; m < g.M; ++m)
      if (mask[m]) acc_x += std::norm(a.values[m] - b.values[m]);
    acc += traj.spacing * acc_x * g.dx();
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Operator-norm estimation on finite mode spaces.

using CVec = std::vector<std::complex<double>>;

// A black-box linear map with its adjoint.  Vectors are plain coefficient
// arrays; the uniform dx weight cancels in operator norms.
struct LinearOp {
  std::size_t dim = 0;
  std::function<CVec(const CVec&)> apply;
  std::function<CVec(const CVec&)> apply_adjoint;
};

inline LinearOp op_identity(std::size_t dim) {
  auto id = [](const CVec& v) { return v; };
  return {dim, id, id};
}

inline LinearOp op_compose(const LinearOp& A, const LinearOp& B) {
  if (A.dim != B.dim) throw config_error("op_compose: dimension mismatch");
  return {A.dim,
          [A, B](const CVec& v) { return A.apply(B.apply(v)); },
          [A, B](const CVec& v) { return B.apply_adjoint(A.apply_adjoint(v)); }};
}

inline LinearOp op_subtract(const LinearOp& A, const LinearOp& B) {
  if (A.dim != B.dim) throw config_error("op_subtract: dimension mismatch");
  auto sub = [](CVec a, const CVec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
  };
  return {A.dim,
          [A, B, sub](const CVec& v) { return sub(A.apply(v), B.apply(v)); },
          [A, B, sub](const CVec& v) {
            return sub(A.apply_adjoint(v), B.apply_adjoint(v));
          }};
}

inline LinearOp op_commutator(const LinearOp& A, const LinearOp& B) {
  return op_subtract(op_compose(A, B), op_compose(B, A));
}

// pointwise multiplication by a real function sampled on the grid
// (self-adjoint); vectors are physical samples
inline LinearOp op_multiply(const std::vector<double>& w) {
  auto mul = [w](const CVec& v) {
    CVec out = v;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= w[i];
    return out;
  };
  return {w.size(), mul, mul};
}

inline LinearOp op_cutoff(const CutoffFamily& fam, bool complement = false) {
  std::vector<double> w = fam.values;
  if (complement)
    for (auto& v : w) v = 1.0 - v;
  return op_multiply(w);
}

// Fourier multiplier on the grid's own lattice; adjoint conjugates the
// symbol.  Vectors are physical samples.
inline LinearOp op_symbol(const Grid& g, const MultiplierSymbol& m) {
  std::vector<std::complex<double>> sym(g.M);
  for (std::size_t j = 0; j < g.M; ++j) sym[j] = m.eval(g.xi(j));
  auto make = [g](std::vector<std::complex<double>> s) {
    return [g, s = std::move(s)](const CVec& v) {
      CVec out = v;
      detail::FftPlans::instance().forward(out.data(), g.M);
      for (std::size_t j = 0; j < g.M; ++j) out[j] *= s[j];
      detail::FftPlans::instance().backward(out.data(), g.M);
      return out;
    };
  };
  std::vector<std::complex<double>> conj_sym(g.M);
  for (std::size_t j = 0; j < g.M; ++j) conj_sym[j] = std::conj(sym[j]);
  return {g.M, make(sym), make(conj_sym)};
}

inline LinearOp op_low_pass(const Grid& g, double N) {
  return op_symbol(g, low_pass_symbol(N));
}

inline double vec_l2(const CVec& v) {
  double acc = 0.0;
  for (const auto& c : v) acc += std::norm(c);
  return std::sqrt(acc);
}

// Largest singular value of A by power iteration on A*A with a
// deterministic seeded start.  Converges when the estimate is stable to
// the relative tolerance over three consecutive iterations.
inline double operator_norm(const LinearOp& A, double tol = 1e-13,
                            std::size_t max_iter = 50000,
                            std::uint64_t seed = 0x5eedull) {
  if (A.dim == 0) throw config_error("operator_norm: zero-dimensional operator");
  SeededRng rng(seed);
  CVec v(A.dim);
  for (auto& c : v) c = rng.cnormal();
  double nv = vec_l2(v);
  if (nv == 0.0) throw internal_error("operator_norm: degenerate start vector");
  for (auto& c : v) c /= nv;
  double est_prev = -1.0;
  std::size_t stable = 0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    CVec w = A.apply(v);
    const double est = vec_l2(w);
    if (est < 1e-150) return 0.0;
    CVec u = A.apply_adjoint(w);
    const double nu = vec_l2(u);
    if (nu < 1e-150) return 0.0;
    for (auto& c : u) c /= nu;
    v = std::move(u);
    if (est_prev >= 0.0 &&
        std::fabs(est - est_prev) <= tol * std::max(est, 1e-30)) {
      if (++stable >= 3) return est;
    } else {
      stable = 0;
    }
    est_prev = est;
  }
  throw numeric_error("operator_norm: power iteration did not converge; last estimate " +
                      detail::fmt_double(est_prev));
}

}  // namespace nlslab
