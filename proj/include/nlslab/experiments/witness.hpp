#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "nlslab/diagnostics.hpp"
#include "nlslab/dynamics.hpp"
#include "nlslab/experiments/schedule.hpp"
#include "nlslab/report.hpp"
#include "nlslab/rng.hpp"

namespace nlslab {

// Finite-dimensional non-squeezing instance: maximize
// J(u0) = |<l~, u(T; u0)> - alpha| over the ball B(P^L_{<=N} z~, R - 4 delta)
// inside the sharp band space H = {modes |xi| <= 2N}.
struct WitnessProblem {
  Grid grid;
  ComplexField z_star;
  ComplexField l;  // ||l||_2 = 1
  std::complex<double> alpha = 0.0;
  double r = 0.0, R = 0.0;
  double delta = 0.0;
  double T = 0.0;
  double N = 0.0;
  Sign sign = Sign::defocusing;
  double dt = 2e-3;
  double coupling = 1.0;
  double window_inner = 0.0;  // mollification window; 0 = L/4 and 3L/8
  double window_outer = 0.0;
};

struct WitnessOptions {
  int starts = 8;
  int max_iters = 40;
  int max_backtracks = 8;
  double fd_step = 1e-5;       // central-difference step in coefficient units
  double improve_tol = 1e-7;   // stop once gains fall below this twice
  std::uint64_t seed = 1;
};

namespace detail {

struct BandSpace {
  std::vector<std::size_t> modes;  // spectral indices with |xi_k| <= 2N
};

inline BandSpace band_space(const Grid& g, double N) {
  BandSpace h;
  for (std::size_t j = 0; j < g.M; ++j)
    if (std::fabs(g.xi(j)) <= 2.0 * N) h.modes.push_back(j);
  return h;
}

// evaluate the flow map u0 -> u(T) keeping only the final snapshot
inline ComplexField evolve_final(const ComplexField& u0, const SolverConfig& cfg) {
  ComplexField out;
  integrate(u0, cfg, +1.0, nullptr,
            [&](std::size_t, double t, const ComplexField& u) {
              if (std::fabs(t - cfg.T) < 1e-12 * std::max(1.0, cfg.T)) out = u;
            });
  return out;
}

}  // namespace detail

// Mollified data for a witness problem: z~ (windowed, sharp-banded),
// l~ (windowed, renormalized), and the search-ball center P^L_{<=N} z~.
struct WitnessSetup {
  ComplexField z_tilde;
  ComplexField l_tilde;
  ComplexField center;  // spectral
  double high_band_l = 0.0;  // ||P_{>2N} l~||_2, tracked for the record
};

inline WitnessSetup witness_prepare(const WitnessProblem& p) {
  const Grid& g = p.grid;
  if (!(p.R > 0.0) || !(p.r > 0.0) || !(p.r < p.R))
    throw config_error("witness: need 0 < r < R");
  if (!(p.delta > 0.0) || !(p.delta < (p.R - p.r) / 8.0))
    throw config_error("witness: delta must satisfy delta < (R-r)/8");
  if (!(p.N > 0.0) || !(p.T > 0.0)) throw config_error("witness: need N, T > 0");
  if (std::fabs(l2_norm(p.l) - 1.0) > 1e-12)
    throw config_error("witness: l must have unit L2 norm");
  if (!(p.z_star.grid == g) || !(p.l.grid == g))
    throw config_error("witness: field grids do not match the problem grid");

  // mollification: compact window then sharp band truncation
  const double win_in = p.window_inner > 0.0 ? p.window_inner : g.L / 4.0;
  const double win_out = p.window_outer > 0.0 ? p.window_outer : 3.0 * g.L / 8.0;
  if (!(win_in < win_out) || win_out >= g.L / 2.0)
    throw config_error("witness: invalid mollification window");
  std::vector<double> W(g.M);
  for (std::size_t m = 0; m < g.M; ++m)
    W[m] = smooth_step((win_out - g.dist(g.x(m), 0.0)) / (win_out - win_in));

  auto windowed = [&](const ComplexField& f) {
    ComplexField out = as_physical(f);
    for (std::size_t m = 0; m < g.M; ++m) out.values[m] *= W[m];
    return out;
  };
  WitnessSetup s;
  s.z_tilde = sharp_band_project(windowed(p.z_star), 2.0 * p.N);
  s.l_tilde = windowed(p.l);
  const double ln = l2_norm(s.l_tilde);
  if (!(ln > 0.0)) throw config_error("witness: mollified l vanished");
  for (auto& v : s.l_tilde.values) v /= ln;

  const double Mz = l2_norm(p.z_star) + p.R;
  ComplexField dz = as_physical(s.z_tilde);
  const ComplexField zp = as_physical(p.z_star);
  for (std::size_t m = 0; m < g.M; ++m) dz.values[m] -= zp.values[m];
  if (l2_norm(dz) > p.delta)
    throw config_error("witness: mollification misses ||z - z~|| <= delta");
  ComplexField dl = as_physical(s.l_tilde);
  const ComplexField lp = as_physical(p.l);
  for (std::size_t m = 0; m < g.M; ++m) dl.values[m] -= lp.values[m];
  if (l2_norm(dl) > p.delta / Mz)
    throw config_error("witness: mollification misses ||l - l~|| <= delta/M");

  ComplexField hi = as_spectral(s.l_tilde);
  for (std::size_t j = 0; j < g.M; ++j)
    if (std::fabs(g.xi(j)) <= 2.0 * p.N) hi.values[j] = 0.0;
  s.high_band_l = l2_norm(hi);

  s.center = as_spectral(lp_project(s.z_tilde, p.N, LpKind::low));
  return s;
}

inline ExperimentReport run_witness_search(const WitnessProblem& p,
                                           const WitnessOptions& opts = {}) {
  const Grid& g = p.grid;
  const WitnessSetup setup = witness_prepare(p);
  const ComplexField& l_tilde = setup.l_tilde;
  const ComplexField& center = setup.center;

  const detail::BandSpace H = detail::band_space(g, p.N);
  const double rho = p.R - 4.0 * p.delta;

  SolverConfig cfg;
  cfg.sign = p.sign;
  cfg.truncation = Truncation::torus_low_pass;
  cfg.integrator = Integrator::strang_rk4;
  cfg.N = p.N;
  cfg.dt = p.dt;
  cfg.T = p.T;
  cfg.coupling = p.coupling;
  cfg.stride = cfg.steps();
  cfg.l2_cap = std::max(4.0, 2.0 * (l2_norm(p.z_star) + p.R));

  std::uint64_t evals = 0;
  auto J = [&](const ComplexField& u0_spec) {
    ++evals;
    const ComplexField uT = detail::evolve_final(u0_spec, cfg);
    return std::abs(pairing(l_tilde, uT) - p.alpha);
  };

  const double dx = g.dx();
  auto dist_to_center = [&](const ComplexField& x) {
    double acc = 0.0;
    for (std::size_t j : H.modes) acc += std::norm(x.values[j] - center.values[j]);
    return std::sqrt(acc * dx);
  };
  auto project_ball = [&](ComplexField x) {
    const double d = dist_to_center(x);
    if (d > rho) {
      const double s = rho / d;
      for (std::size_t j : H.modes)
        x.values[j] = center.values[j] + s * (x.values[j] - center.values[j]);
    }
    return x;
  };

  ExperimentReport rep;
  rep.experiment = "witness";
  rep.seed = opts.seed;
  rep.scalars["rho"] = rho;
  rep.scalars["target"] = p.r + 4.0 * p.delta;
  rep.scalars["phase_space_dim"] = 2.0 * static_cast<double>(H.modes.size());
  rep.scalars["l_high_band"] = setup.high_band_l;

  ComplexField best_u0 = center;
  double best_J = -1.0;
  int best_start = -1;

  if (rho <= 0.0) {
    // degenerate ball: evaluate the center, no search
    best_J = J(center);
    best_u0 = center;
    rep.scalars["degenerate_ball"] = 1.0;
  } else {
    std::vector<double> start_J(static_cast<std::size_t>(opts.starts), 0.0);
    for (int s = 0; s < opts.starts; ++s) {
      SeededRng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(s)));
      ComplexField x = center;
      {
        double acc = 0.0;
        std::vector<std::complex<double>> dirv(H.modes.size());
        for (std::size_t i = 0; i < H.modes.size(); ++i) {
          dirv[i] = rng.cnormal();
          acc += std::norm(dirv[i]);
        }
        const double s0 = 0.9 * rho / std::sqrt(acc * dx);
        for (std::size_t i = 0; i < H.modes.size(); ++i)
          x.values[H.modes[i]] += s0 * dirv[i];
      }
      x = project_ball(x);
      double fx = J(x);
      double gamma = 0.0;
      int small_gains = 0;
      for (int it = 0; it < opts.max_iters; ++it) {
        // central-difference gradient in the 2*dim real coordinates
        std::vector<std::complex<double>> grad(H.modes.size());
        const double h = opts.fd_step * std::max(1.0, rho / std::sqrt(dx));
        for (std::size_t i = 0; i < H.modes.size(); ++i) {
          ComplexField xp = x;
          xp.values[H.modes[i]] += h;
          const double fp = J(xp);
          xp.values[H.modes[i]] -= 2.0 * h;
          const double fm = J(xp);
          double gre = (fp - fm) / (2.0 * h);
          xp = x;
          xp.values[H.modes[i]] += std::complex<double>(0.0, h);
          const double fpi = J(xp);
          xp.values[H.modes[i]] -= std::complex<double>(0.0, 2.0 * h);
          const double fmi = J(xp);
          grad[i] = {gre, (fpi - fmi) / (2.0 * h)};
        }
        double gn = 0.0;
        for (const auto& c : grad) gn += std::norm(c);
        gn = std::sqrt(gn);
        if (gn < 1e-14) break;
        if (gamma == 0.0) gamma = 0.25 * (rho / std::sqrt(dx)) / gn;
        bool accepted = false;
        for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
          ComplexField cand = x;
          for (std::size_t i = 0; i < H.modes.size(); ++i)
            cand.values[H.modes[i]] += gamma * grad[i];
          cand = project_ball(cand);
          const double fc = J(cand);
          if (fc > fx) {
            const double gain = fc - fx;
            x = std::move(cand);
            fx = fc;
            accepted = true;
            gamma *= 2.0;
            small_gains = gain < opts.improve_tol ? small_gains + 1 : 0;
            break;
          }
          gamma *= 0.5;
        }
        if (!accepted || small_gains >= 2) break;
      }
      start_J[static_cast<std::size_t>(s)] = fx;
      if (fx > best_J) {
        best_J = fx;
        best_u0 = x;
        best_start = s;
      }
    }
    rep.series["start_best_J"] = start_J;
  }

  const double dcheck = dist_to_center(best_u0);
  if (dcheck > rho + 1e-12)
    throw internal_error("witness: optimizer left the search ball");

  // final margins: mollified target and the unmollified functional
  const ComplexField uT = detail::evolve_final(best_u0, cfg);
  const double final_J = std::abs(pairing(l_tilde, uT) - p.alpha);
  const double margin_l = std::abs(pairing(p.l, uT) - p.alpha);

  rep.scalars["best_J"] = best_J;
  rep.scalars["final_J"] = final_J;
  rep.scalars["margin_unmollified"] = margin_l;
  rep.scalars["distance_to_center"] = dcheck;
  rep.scalars["objective_evaluations"] = static_cast<double>(evals);
  rep.scalars["best_start"] = static_cast<double>(best_start);
  rep.verdicts["witness_found"] = best_J > p.r + 4.0 * p.delta;
  rep.verdicts["margin_exceeds_r"] = margin_l > p.r;
  if (!(best_J > p.r + 4.0 * p.delta)) rep.scalars["best_found_only"] = 1.0;
  return rep;
}

}  // namespace nlslab
