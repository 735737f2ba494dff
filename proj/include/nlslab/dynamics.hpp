#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/multiplier.hpp"

namespace nlslab {

enum class Truncation { none, low_pass, torus_low_pass };
enum class Integrator { strang_exact_phase, strang_rk4 };
enum class Sign : int { defocusing = +1, focusing = -1 };

// Configuration for i u_t + Delta u = P F(P u) with F(u) = sigma |u|^2 u,
// where P is the identity or the smooth low-pass at cutoff N (low_pass on
// a line-surrogate grid, torus_low_pass on a torus grid; both act through
// their own grid's frequency lattice).
struct SolverConfig {
  Sign sign = Sign::defocusing;
  Truncation truncation = Truncation::none;
  double N = 0.0;   // low-pass cutoff, used when truncation != none
  double dt = 1e-3;
  double T = 1.0;
  std::size_t stride = 1;  // snapshot every `stride` steps
  Integrator integrator = Integrator::strang_exact_phase;
  double coupling = 1.0;  // test hook: 0 turns the nonlinearity off
  double l2_cap = 4.0;    // guard on ||u0||_2

  bool truncated() const { return truncation != Truncation::none; }

  void validate() const {
    if (!(dt > 0.0)) throw config_error("solver.dt must be positive");
    if (!(T > 0.0)) throw config_error("solver.T must be positive");
    if (dt > T * (1.0 + 1e-12)) throw config_error("solver.dt must not exceed solver.T");
    if (stride < 1) throw config_error("solver.stride must be >= 1");
    if (truncation == Truncation::none) {
      if (integrator != Integrator::strang_exact_phase)
        throw config_error("truncation=none requires the strang-exact-phase integrator");
    } else {
      if (integrator != Integrator::strang_rk4)
        throw config_error("low-pass truncation requires the strang-rk4 integrator");
      if (!(N > 0.0)) throw config_error("solver.N must be positive when truncating");
    }
    if (!(coupling >= 0.0)) throw config_error("solver coupling must be >= 0");
    if (!(l2_cap > 0.0)) throw config_error("solver l2 cap must be positive");
  }

  std::size_t steps() const {
    const double n = T / dt;
    const auto ni = static_cast<std::size_t>(std::llround(n));
    if (std::fabs(static_cast<double>(ni) - n) > 1e-6 * std::max(1.0, n))
      throw config_error("solver.T must be an integer multiple of solver.dt");
    return ni;
  }
};

// External forcing e(t, x) = envelope(t) * shape(x), added to the right
// side of the equation (supported by the rk4 substep only).
struct Forcing {
  ComplexField shape;
  std::function<double(double)> envelope;
};

// Uniformly sampled time series of fields plus the configuration that
// produced it.  Snapshot s sits at time t0 + s * spacing.
struct Trajectory {
  SolverConfig config;
  Grid grid;
  double t0 = 0.0;
  double spacing = 0.0;
  std::vector<ComplexField> fields;  // physical representation
  double mass_drift = 0.0;  // max relative mass deviation seen at snapshots

  std::size_t size() const { return fields.size(); }
  double time(std::size_t s) const { return t0 + static_cast<double>(s) * spacing; }
  double t_end() const { return fields.empty() ? t0 : time(fields.size() - 1); }

  // index of the snapshot nearest to time t
  std::size_t nearest(double t) const {
    if (spacing <= 0.0 || fields.size() < 2) return 0;
    const double s = (t - t0) / spacing;
    const auto i = static_cast<long long>(std::llround(s));
    if (i < 0) return 0;
    if (i >= static_cast<long long>(fields.size()))
      return fields.size() - 1;
    return static_cast<std::size_t>(i);
  }
};

// P(sigma * coupling * |P u|^2 * P u) with P taken from the configuration.
// Output is physical.
inline ComplexField nonlinear_term(const ComplexField& u, const SolverConfig& cfg) {
  if (!u.finite()) throw numeric_error("nonlinear_term: input contains NaN/Inf");
  const double sc = static_cast<double>(static_cast<int>(cfg.sign)) * cfg.coupling;
  ComplexField p = cfg.truncated()
                       ? as_physical(apply_symbol(u, low_pass_symbol(cfg.N)))
                       : as_physical(u);
  for (auto& v : p.values) v *= sc * std::norm(v);
  if (!cfg.truncated()) return p;
  return as_physical(lp_project(p, cfg.N, LpKind::low));
}

namespace detail {

// Strang stepper with preallocated buffers.  State is kept spectral; the
// half kicks are exact phase multiplications, the nonlinear substep is
// either an exact pointwise phase rotation (untruncated) or one classical
// RK4 step of psi' = -i [P F(P psi) + e(t)].
class Stepper {
 public:
  Stepper(const Grid& g, const SolverConfig& cfg, double direction,
          const Forcing* forcing)
      : grid_(g), cfg_(cfg), dts_(direction * cfg.dt), forcing_(forcing) {
    const std::size_t M = g.M;
    half_kick_.resize(M);
    for (std::size_t j = 0; j < M; ++j) {
      const double xi = g.xi(j);
      half_kick_[j] = std::exp(std::complex<double>(0.0, -xi * xi * dts_ / 2.0));
    }
    if (cfg.truncated()) {
      lowpass_.resize(M);
      for (std::size_t j = 0; j < M; ++j)
        lowpass_[j] = low_pass_profile(g.xi(j) / cfg.N);
    }
    if (cfg.integrator == Integrator::strang_rk4) {
      k1_.resize(M); k2_.resize(M); k3_.resize(M); k4_.resize(M);
      stage_.resize(M);
    }
    work_.resize(M);
    if (forcing_) {
      if (cfg.integrator != Integrator::strang_rk4)
        throw config_error("forcing requires the strang-rk4 integrator");
      ComplexField sh = as_spectral(forcing_->shape);
      if (!(sh.grid == g)) throw config_error("forcing shape grid mismatch");
      fshape_ = std::move(sh.values);
    }
  }

  // advance one full step from time t (in the signed sense)
  void advance(std::vector<std::complex<double>>& psi, double t) {
    kick(psi);
    if (cfg_.integrator == Integrator::strang_exact_phase)
      phase_substep(psi);
    else
      rk4_substep(psi, t);
    kick(psi);
  }

  double signed_dt() const { return dts_; }

 private:
  void kick(std::vector<std::complex<double>>& psi) const {
    for (std::size_t j = 0; j < psi.size(); ++j) psi[j] *= half_kick_[j];
  }

  void phase_substep(std::vector<std::complex<double>>& psi) {
    auto& u = work_;
    u = psi;
    FftPlans::instance().backward(u.data(), grid_.M);
    const double sc = static_cast<double>(static_cast<int>(cfg_.sign)) * cfg_.coupling;
    for (auto& v : u)
      v *= std::exp(std::complex<double>(0.0, -sc * std::norm(v) * dts_));
    FftPlans::instance().forward(u.data(), grid_.M);
    psi = u;
  }

  // out = -i [ P F(P phi) + envelope(t) * shape ]
  void rhs(const std::vector<std::complex<double>>& phi, double t,
           std::vector<std::complex<double>>& out) {
    const std::size_t M = grid_.M;
    out = phi;
    for (std::size_t j = 0; j < M; ++j) out[j] *= lowpass_[j];
    FftPlans::instance().backward(out.data(), M);
    const double sc = static_cast<double>(static_cast<int>(cfg_.sign)) * cfg_.coupling;
    for (auto& v : out) v *= sc * std::norm(v);
    FftPlans::instance().forward(out.data(), M);
    for (std::size_t j = 0; j < M; ++j) out[j] *= lowpass_[j];
    if (!fshape_.empty()) {
      const double e = forcing_->envelope(t);
      for (std::size_t j = 0; j < M; ++j) out[j] += e * fshape_[j];
    }
    const std::complex<double> mi(0.0, -1.0);
    for (auto& v : out) v *= mi;
  }

  void rk4_substep(std::vector<std::complex<double>>& psi, double t) {
    const std::size_t M = grid_.M;
    const double h = dts_;
    rhs(psi, t, k1_);
    for (std::size_t j = 0; j < M; ++j) stage_[j] = psi[j] + 0.5 * h * k1_[j];
    rhs(stage_, t + 0.5 * h, k2_);
    for (std::size_t j = 0; j < M; ++j) stage_[j] = psi[j] + 0.5 * h * k2_[j];
    rhs(stage_, t + 0.5 * h, k3_);
    for (std::size_t j = 0; j < M; ++j) stage_[j] = psi[j] + h * k3_[j];
    rhs(stage_, t + h, k4_);
    for (std::size_t j = 0; j < M; ++j)
      psi[j] += h / 6.0 * (k1_[j] + 2.0 * k2_[j] + 2.0 * k3_[j] + k4_[j]);
  }

  Grid grid_;
  SolverConfig cfg_;
  double dts_;
  const Forcing* forcing_;
  std::vector<std::complex<double>> half_kick_;
  std::vector<double> lowpass_;
  std::vector<std::complex<double>> k1_, k2_, k3_, k4_, stage_, work_;
  std::vector<std::complex<double>> fshape_;
};

inline double spectral_l2(const std::vector<std::complex<double>>& v, double dx) {
  double acc = 0.0;
  for (const auto& c : v) acc += std::norm(c);
  return std::sqrt(acc * dx);
}

}  // namespace detail

// One Strang step of length dt applied to u; representation preserved.
inline ComplexField step(const ComplexField& u, const SolverConfig& cfg,
                         double t = 0.0, const Forcing* forcing = nullptr) {
  cfg.validate();
  if (!u.finite()) throw numeric_error("step: input contains NaN/Inf");
  detail::Stepper st(u.grid, cfg, +1.0, forcing);
  ComplexField s = as_spectral(u);
  st.advance(s.values, t);
  if (!s.finite()) throw numeric_error("step: state became non-finite");
  return u.rep == Rep::physical ? as_physical(s) : s;
}

using SnapshotFn =
    std::function<void(std::size_t index, double t, const ComplexField& u_physical)>;

// Core driver: integrate from t = 0 over `steps()` steps in the given time
// direction (+1 forward, -1 backward), invoking the snapshot callback at
// stride boundaries (including step 0 and the final step).
inline void integrate(const ComplexField& u0, const SolverConfig& cfg,
                      double direction, const Forcing* forcing,
                      const SnapshotFn& on_snapshot) {
  cfg.validate();
  if (!(u0.grid.M >= 8)) throw config_error("integrate: invalid grid");
  if (!u0.finite()) throw numeric_error("integrate: initial data contains NaN/Inf");
  const std::size_t n = cfg.steps();
  if (n % cfg.stride != 0)
    throw config_error("solver.stride must divide the number of steps T/dt");
  ComplexField spec = as_spectral(u0);
  const double l2_0 = detail::spectral_l2(spec.values, u0.grid.dx());
  if (l2_0 > cfg.l2_cap * (1.0 + 1e-12))
    throw config_error("integrate: ||u0||_2 exceeds the configured cap");
  detail::Stepper st(u0.grid, cfg, direction, forcing);
  const double dts = st.signed_dt();

  auto emit = [&](std::size_t idx, double t) {
    if (!spec.finite())
      throw numeric_error("solver blow-up at t=" + detail::fmt_double(t));
    on_snapshot(idx, t, as_physical(spec));
  };

  emit(0, 0.0);
  std::size_t idx = 1;
  for (std::size_t s = 0; s < n; ++s) {
    st.advance(spec.values, static_cast<double>(s) * dts);
    if ((s + 1) % cfg.stride == 0) emit(idx++, static_cast<double>(s + 1) * dts);
  }
}

// Integrate over [0, T] and collect snapshots.
inline Trajectory solve(const ComplexField& u0, const SolverConfig& cfg,
                        const Forcing* forcing = nullptr) {
  Trajectory traj;
  traj.config = cfg;
  traj.grid = u0.grid;
  traj.t0 = 0.0;
  traj.spacing = cfg.dt * static_cast<double>(cfg.stride);
  double mass0 = -1.0;
  integrate(u0, cfg, +1.0, forcing,
            [&](std::size_t, double, const ComplexField& u) {
              double m = 0.0;
              for (const auto& v : u.values) m += std::norm(v);
              m *= u.grid.dx();
              if (mass0 < 0.0)
                mass0 = m;
              else if (mass0 > 0.0)
                traj.mass_drift =
                    std::max(traj.mass_drift, std::fabs(m - mass0) / mass0);
              traj.fields.push_back(u);
            });
  return traj;
}

// Two independent solves from t = 0 merged into one trajectory over
// [-T, T]; the t = 0 snapshot is shared.
inline Trajectory solve_bidirectional(const ComplexField& u0, const SolverConfig& cfg,
                                      const Forcing* forcing = nullptr) {
  Trajectory fwd = solve(u0, cfg, forcing);
  Trajectory traj;
  traj.config = cfg;
  traj.grid = u0.grid;
  traj.spacing = fwd.spacing;
  traj.t0 = -cfg.T;
  std::vector<ComplexField> back;
  integrate(u0, cfg, -1.0, forcing,
            [&](std::size_t, double, const ComplexField& u) { back.push_back(u); });
  traj.fields.reserve(back.size() + fwd.fields.size() - 1);
  for (auto it = back.rbegin(); it != back.rend(); ++it) traj.fields.push_back(*it);
  for (std::size_t s = 1; s < fwd.fields.size(); ++s)
    traj.fields.push_back(fwd.fields[s]);
  traj.mass_drift = fwd.mass_drift;
  return traj;
}

// L2 norm of u(T) - [e^{iT Delta} u0 - i * trapezoid_s e^{i(T-t_s) Delta}
// P F(P u(t_s))], relative to ||u0||_2.  Snapshots provide the quadrature
// nodes; the propagator factors are exact.
inline double duhamel_residual(const Trajectory& traj) {
  if (traj.size() < 3)
    throw config_error("duhamel_residual: need at least 3 snapshots");
  if (std::fabs(traj.t0) > 1e-12)
    throw config_error("duhamel_residual: trajectory must start at t=0");
  const Grid& g = traj.grid;
  const double T = traj.t_end();
  const std::size_t S = traj.size();
  std::vector<std::complex<double>> acc(g.M, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    const double ts = traj.time(s);
    const double w = (s == 0 || s + 1 == S) ? 0.5 * traj.spacing : traj.spacing;
    ComplexField G = as_spectral(nonlinear_term(traj.fields[s], traj.config));
    for (std::size_t j = 0; j < g.M; ++j) {
      const double xi = g.xi(j);
      const auto phase = std::exp(std::complex<double>(0.0, -xi * xi * (T - ts)));
      acc[j] += w * phase * G.values[j];
    }
  }
  ComplexField u0hat = as_spectral(traj.fields.front());
  ComplexField uThat = as_spectral(traj.fields.back());
  double r2 = 0.0;
  const std::complex<double> mi(0.0, -1.0);
  for (std::size_t j = 0; j < g.M; ++j) {
    const double xi = g.xi(j);
    const auto freeprop = std::exp(std::complex<double>(0.0, -xi * xi * T));
    const auto pred = freeprop * u0hat.values[j] + mi * acc[j];
    r2 += std::norm(uThat.values[j] - pred);
  }
  const double resid = std::sqrt(r2 * g.dx());
  const double n0 = detail::spectral_l2(u0hat.values, g.dx());
  if (n0 == 0.0) return resid == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return resid / n0;
}

}  // namespace nlslab
