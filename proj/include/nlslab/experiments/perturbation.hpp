#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "nlslab/diagnostics.hpp"
#include "nlslab/dynamics.hpp"
#include "nlslab/report.hpp"
#include "nlslab/rng.hpp"

namespace nlslab {

struct PerturbOptions {
  Sign sign = Sign::defocusing;
  double dt = 1e-3;
  std::size_t stride = 10;
  double coupling = 1.0;       // 0 turns the flow linear (isometry control)
  std::uint64_t dir_seed = 1;  // seeded unit direction for the data shift
  double ratio_factor = 3.0;   // pass gate on the spread of ||u-u~||_S / eps
};

namespace detail {

struct DiffNorms {
  double s = 0.0;        // discrete S-norm of the difference
  double linf_l2 = 0.0;  // sup over snapshots of the L2 difference
};

// discrete S-norm of the difference of two trajectories sharing times
inline DiffNorms diff_strichartz(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size() || std::fabs(a.spacing - b.spacing) > 1e-15)
    throw internal_error("diff_strichartz: trajectories are not aligned");
  double max_l2 = 0.0, sum4 = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    double err2 = 0.0, sup = 0.0;
    for (std::size_t m = 0; m < a.grid.M; ++m) {
      const double d = std::abs(a.fields[s].values[m] - b.fields[s].values[m]);
      err2 += d * d;
      sup = std::max(sup, d);
    }
    max_l2 = std::max(max_l2, std::sqrt(err2 * a.grid.dx()));
    sum4 += a.spacing * sup * sup * sup * sup;
  }
  return {max_l2 + std::pow(sum4, 0.25), max_l2};
}

}  // namespace detail

// Stability probe for the truncated torus flow: perturb the data by
// eps * direction and force the equation by e with ||e||_{L^1_t L^2_x} = eps,
// then record ||u - u~||_S / eps across the eps list.  Linear response
// means the ratios agree up to a bounded factor.  A zero forcing shape
// runs the data-only perturbation (the isometry control).
inline ExperimentReport run_perturbation(const ComplexField& u0,
                                         const std::vector<double>& eps_list,
                                         const ComplexField& forcing_shape,
                                         double N, double T,
                                         std::uint64_t seed = 0,
                                         const PerturbOptions& opts = {}) {
  if (eps_list.empty()) throw config_error("perturbation: empty eps list");
  const Grid& g = u0.grid;
  if (!(forcing_shape.grid == g))
    throw config_error("perturbation: forcing shape grid mismatch");

  SolverConfig cfg;
  cfg.sign = opts.sign;
  cfg.truncation = Truncation::torus_low_pass;
  cfg.integrator = Integrator::strang_rk4;
  cfg.N = N;
  cfg.dt = opts.dt;
  cfg.T = T;
  cfg.stride = opts.stride;
  cfg.coupling = opts.coupling;

  const Trajectory base = solve_bidirectional(u0, cfg);

  // unit-norm direction for the data shift
  SeededRng rng(derive_seed(seed, opts.dir_seed));
  ComplexField dir = random_band_limited(g, 2.0 * N, 1.0, rng);
  dir = as_physical(dir);

  const double shape_l2 = l2_norm(forcing_shape);
  const bool with_forcing = shape_l2 > 0.0;
  const ComplexField shape_phys = as_physical(forcing_shape);

  ExperimentReport rep;
  rep.experiment = "perturb";
  rep.seed = seed;
  std::vector<double> ratios, linf_ratios, used_eps;
  bool exact_match_seen = false;
  for (const double eps : eps_list) {
    if (eps < 0.0) throw config_error("perturbation: eps must be >= 0");
    if (eps == 0.0) {
      // identical inputs must reproduce the baseline bit for bit
      const Trajectory again = solve_bidirectional(u0, cfg);
      bool same = again.size() == base.size();
      for (std::size_t s = 0; same && s < base.size(); ++s)
        for (std::size_t m = 0; m < g.M; ++m)
          if (again.fields[s].values[m] != base.fields[s].values[m]) {
            same = false;
            break;
          }
      if (!same) throw internal_error("perturbation: eps=0 rerun diverged");
      exact_match_seen = true;
      continue;
    }
    ComplexField shifted = as_physical(u0);
    for (std::size_t m = 0; m < g.M; ++m)
      shifted.values[m] += eps * dir.values[m];
    Trajectory pert;
    if (with_forcing) {
      // constant-in-time envelope scaled so the L^1_t L^2_x size over
      // [-T,T] equals eps
      Forcing forcing;
      forcing.shape = shape_phys;
      const double scale = eps / (2.0 * T * shape_l2);
      for (auto& v : forcing.shape.values) v *= scale;
      forcing.envelope = [](double) { return 1.0; };
      pert = solve_bidirectional(shifted, cfg, &forcing);
    } else {
      pert = solve_bidirectional(shifted, cfg);
    }
    const detail::DiffNorms d = detail::diff_strichartz(pert, base);
    ratios.push_back(d.s / eps);
    linf_ratios.push_back(d.linf_l2 / eps);
    used_eps.push_back(eps);
  }

  rep.series["eps"] = used_eps;
  rep.series["s_ratio"] = ratios;
  rep.series["linf_l2_ratio"] = linf_ratios;
  rep.scalars["N"] = N;
  rep.scalars["T"] = T;
  if (exact_match_seen) rep.scalars["exact_match"] = 1.0;
  if (!ratios.empty()) {
    const double spread = spread_factor(ratios);
    rep.scalars["ratio_spread"] = spread;
    rep.verdicts["ratio_within_factor"] = spread <= opts.ratio_factor;
    // eps0 guard: blow-up of the largest-eps ratio is reported, not failed
    std::size_t imax = 0, imin = 0;
    for (std::size_t i = 1; i < used_eps.size(); ++i) {
      if (used_eps[i] > used_eps[imax]) imax = i;
      if (used_eps[i] < used_eps[imin]) imin = i;
    }
    rep.scalars["eps0_guard_flag"] =
        ratios[imax] > opts.ratio_factor * ratios[imin] ? 1.0 : 0.0;
  }
  return rep;
}

}  // namespace nlslab
