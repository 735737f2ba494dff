#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "nlslab/diagnostics.hpp"
#include "nlslab/dynamics.hpp"
#include "nlslab/experiments/schedule.hpp"
#include "nlslab/report.hpp"
#include "nlslab/rng.hpp"

namespace nlslab {

struct ApproxOptions {
  Sign sign = Sign::defocusing;
  double dt = 1e-3;
  std::size_t stride = 10;
  double band_fraction = 0.5;  // ensemble band = band_fraction * 2N
  double final_factor = 0.1;   // pass gate: final s_error <= factor * M_bound
  int ml_level = 2;
  double data_scale = 1.0;  // data norm = data_scale * M_bound (0 = zero data)
};

namespace detail {

struct ApproxEntryData {
  double boundary_mass = 0.0;
  double s_error = 0.0;
  double ml_sup = 0.0;
  double resid_deriv = 0.0;
  double resid_proj = 0.0;
  double resid_comm = 0.0;
  double torus_points = 0.0;
  double surrogate_points = 0.0;
};

// One rung of the ladder: solve the truncated flow on the torus and on the
// windowed surrogate (data chi^0 u0), and compare u against
// z = Pi_{<=2N} P^L_{<=2N}(chi^2 u~) in the discrete S-norm.  The three
// residual families of the stability argument (derivative-of-cutoff,
// projector-difference, commutator) are accumulated as L^1_t L^2_x sizes.
// The surrogate run is streamed; only torus-sized fields are retained.
inline ApproxEntryData approx_entry(const ScheduleEntry& e, double M_bound,
                                    double T, std::uint64_t seed,
                                    const ApproxOptions& opts, bool want_z,
                                    int ml_level) {
  const Grid tg = schedule_torus_grid(e);
  const Grid sg = schedule_surrogate_grid(e);
  SeededRng rng(derive_seed(seed, static_cast<std::uint64_t>(e.n)));
  const ComplexField u0 = random_band_limited(
      tg, opts.band_fraction * 2.0 * e.N, opts.data_scale * M_bound, rng);
  const IntervalSelection sel = pigeonhole_interval(u0, e.eta, e.N, T, M_bound);

  std::vector<CutoffFamily> chi;
  for (int j = 0; j <= 4; ++j) chi.push_back(build_cutoff(sel, j, tg, e.N, T, e.eta));
  for (int j = 0; j < 4; ++j)
    for (std::size_t m = 0; m < tg.M; ++m)
      if (chi[j].values[m] * chi[j + 1].values[m] != chi[j].values[m])
        throw internal_error("cutoff nesting violated");

  const WindowEmbedding emb = WindowEmbedding::make(tg, sg, sel.center);
  const std::vector<double> chi2_s = emb.lift_samples(chi[2].values);
  const std::vector<double> chiml_s = emb.lift_samples(chi[ml_level].values);

  // analytic derivatives of the level-2 cutoff, sampled and lifted
  std::vector<double> dchi2_t(tg.M), ddchi2_t(tg.M);
  for (std::size_t m = 0; m < tg.M; ++m) {
    dchi2_t[m] = chi[2].profile_d1(tg.x(m));
    ddchi2_t[m] = chi[2].profile_d2(tg.x(m));
  }
  const std::vector<double> dchi2_s = emb.lift_samples(dchi2_t);
  const std::vector<double> ddchi2_s = emb.lift_samples(ddchi2_t);

  SolverConfig tcfg;
  tcfg.sign = opts.sign;
  tcfg.truncation = Truncation::torus_low_pass;
  tcfg.integrator = Integrator::strang_rk4;
  tcfg.N = e.N;
  tcfg.dt = opts.dt;
  tcfg.T = T;
  tcfg.stride = opts.stride;
  tcfg.l2_cap = std::max(4.0, 2.0 * M_bound);

  Trajectory torus_traj;
  if (want_z) torus_traj = solve_bidirectional(u0, tcfg);

  SolverConfig scfg = tcfg;
  scfg.truncation = Truncation::low_pass;
  const ComplexField us0 = emb.lift(apply_cutoff(chi[0], u0));

  const std::size_t half = tcfg.steps() / tcfg.stride;  // snapshots past t=0
  const double Dt = opts.dt * static_cast<double>(opts.stride);
  const double sigma = static_cast<double>(static_cast<int>(opts.sign));

  ApproxEntryData out;
  out.boundary_mass = sel.boundary_mass;
  out.torus_points = static_cast<double>(tg.M);
  out.surrogate_points = static_cast<double>(sg.M);

  double max_l2 = 0.0, sum_sup4 = 0.0;

  auto process = [&](std::size_t torus_idx, const ComplexField& uS,
                     bool count_time) {
    // mass localization sup_t ||(1 - chi^j) u~(t)||_2
    double ml2 = 0.0;
    for (std::size_t m = 0; m < sg.M; ++m) {
      const double c = 1.0 - chiml_s[m];
      ml2 += c * c * std::norm(uS.values[m]);
    }
    out.ml_sup = std::max(out.ml_sup, std::sqrt(ml2 * sg.dx()));
    if (!want_z) return;

    // window transfer of chi^2 u~
    ComplexField cu = uS;
    for (std::size_t m = 0; m < sg.M; ++m) cu.values[m] *= chi2_s[m];
    const ComplexField a = emb.restrict_to_torus(cu);

    // z = sharp-band o P^L_{<=2N}, compared against the torus solution
    const ComplexField z =
        as_physical(sharp_band_project(lp_project(a, 2.0 * e.N, LpKind::low),
                                       2.0 * e.N));
    const ComplexField& ut = torus_traj.fields[torus_idx];
    double err2 = 0.0, sup = 0.0;
    for (std::size_t m = 0; m < tg.M; ++m) {
      const double d = std::abs(z.values[m] - ut.values[m]);
      err2 += d * d;
      sup = std::max(sup, d);
    }
    max_l2 = std::max(max_l2, std::sqrt(err2 * tg.dx()));
    if (count_time) sum_sup4 += Dt * sup * sup * sup * sup;

    // derivative-of-cutoff residual P^L_{<=2N}[2 chi' u~' + chi'' u~]
    ComplexField uhat = as_spectral(uS);
    ComplexField du = uhat;
    for (std::size_t j = 0; j < sg.M; ++j)
      du.values[j] *= std::complex<double>(0.0, sg.xi(j));
    du = as_physical(du);
    ComplexField s1 = ComplexField::zero(sg);
    for (std::size_t m = 0; m < sg.M; ++m)
      s1.values[m] = 2.0 * dchi2_s[m] * du.values[m] +
                     ddchi2_s[m] * uS.values[m];
    const double dnorm =
        l2_norm(lp_project(emb.restrict_to_torus(s1), 2.0 * e.N, LpKind::low));
    if (count_time) out.resid_deriv += Dt * dnorm;

    // g3 = chi^3 F(P^L_N (chi^2 u~)) on the torus
    ComplexField pa = as_physical(lp_project(a, e.N, LpKind::low));
    ComplexField g3 = pa;
    for (std::size_t m = 0; m < tg.M; ++m)
      g3.values[m] = sigma * std::norm(pa.values[m]) * pa.values[m] *
                     chi[3].values[m];

    // commutator residual [chi^2, P^L_N] g3
    const ComplexField Pg3 = as_physical(lp_project(g3, e.N, LpKind::low));
    ComplexField g3c = g3;
    for (std::size_t m = 0; m < tg.M; ++m) g3c.values[m] *= chi[2].values[m];
    const ComplexField Pg3c = as_physical(lp_project(g3c, e.N, LpKind::low));
    double comm2 = 0.0;
    for (std::size_t m = 0; m < tg.M; ++m)
      comm2 += std::norm(chi[2].values[m] * Pg3.values[m] - Pg3c.values[m]);
    if (count_time) out.resid_comm += Dt * std::sqrt(comm2 * tg.dx());

    // projector-difference residual chi^2 (P_N - P^L_N) g3
    const ComplexField Pl = as_physical(lp_project(emb.lift(g3), e.N, LpKind::low));
    const ComplexField Pw = emb.lift(Pg3);
    double proj2 = 0.0;
    for (std::size_t m = 0; m < sg.M; ++m)
      proj2 += std::norm(chi2_s[m] * (Pl.values[m] - Pw.values[m]));
    if (count_time) out.resid_proj += Dt * std::sqrt(proj2 * sg.dx());
  };

  integrate(us0, scfg, +1.0, nullptr,
            [&](std::size_t idx, double, const ComplexField& uS) {
              process(half + idx, uS, true);
            });
  integrate(us0, scfg, -1.0, nullptr,
            [&](std::size_t idx, double, const ComplexField& uS) {
              if (idx == 0) return;  // t=0 already counted
              process(half - idx, uS, true);
            });

  if (want_z) out.s_error = max_l2 + std::pow(sum_sup4, 0.25);
  return out;
}

}  // namespace detail

// Torus-to-line approximation ladder: random band-limited data of norm
// M_bound, truncated solves on the torus and the windowed surrogate, and
// the S-norm error series ||z_n - u_n|| with its residual bookkeeping and
// the mass-localization series from the same runs.
inline ExperimentReport run_approximation(const std::vector<ScheduleEntry>& sched,
                                          double M_bound, double T,
                                          std::uint64_t seed,
                                          const ApproxOptions& opts = {}) {
  validate_schedule(sched, M_bound, T);
  ExperimentReport rep;
  rep.experiment = "approx";
  rep.seed = seed;
  std::vector<double> s_err, ml, bmass, rd, rp, rc, tp, sp;
  for (const ScheduleEntry& e : sched) {
    const detail::ApproxEntryData d =
        detail::approx_entry(e, M_bound, T, seed, opts, true, opts.ml_level);
    s_err.push_back(d.s_error);
    ml.push_back(d.ml_sup);
    bmass.push_back(d.boundary_mass);
    rd.push_back(d.resid_deriv);
    rp.push_back(d.resid_proj);
    rc.push_back(d.resid_comm);
    tp.push_back(d.torus_points);
    sp.push_back(d.surrogate_points);
  }
  rep.series["s_error"] = s_err;
  rep.series["mass_localization"] = ml;
  rep.series["boundary_mass"] = bmass;
  rep.series["residual_cutoff_derivative"] = rd;
  rep.series["residual_projector_difference"] = rp;
  rep.series["residual_commutator"] = rc;
  rep.series["torus_points"] = tp;
  rep.series["surrogate_points"] = sp;
  rep.scalars["M_bound"] = M_bound;
  rep.scalars["T"] = T;
  rep.scalars["final_s_error"] = s_err.back();
  rep.scalars["final_threshold"] = opts.final_factor * M_bound;
  rep.verdicts["s_error_strictly_decreasing"] = strictly_decreasing(s_err);
  rep.verdicts["s_error_final_below_threshold"] =
      s_err.back() <= opts.final_factor * M_bound;
  rep.verdicts["mass_localization_strictly_decreasing"] = strictly_decreasing(ml);
  return rep;
}

// Mass-localization series sup_t ||(1 - chi^j) u~_n(t)||_2 on its own,
// without the torus comparison.
inline ExperimentReport run_mass_localization(const std::vector<ScheduleEntry>& sched,
                                              double M_bound, double T, int j,
                                              std::uint64_t seed,
                                              const ApproxOptions& opts = {}) {
  if (j < 0 || j > 4) throw config_error("mass localization level j must be in {0..4}");
  validate_schedule(sched, M_bound, T);
  ExperimentReport rep;
  rep.experiment = "mass-loc";
  rep.seed = seed;
  std::vector<double> ml, bmass;
  for (const ScheduleEntry& e : sched) {
    const detail::ApproxEntryData d =
        detail::approx_entry(e, M_bound, T, seed, opts, false, j);
    ml.push_back(d.ml_sup);
    bmass.push_back(d.boundary_mass);
  }
  rep.series["mass_localization"] = ml;
  rep.series["boundary_mass"] = bmass;
  rep.scalars["level"] = j;
  rep.scalars["M_bound"] = M_bound;
  rep.scalars["T"] = T;
  rep.verdicts["mass_localization_strictly_decreasing"] = strictly_decreasing(ml);
  return rep;
}

}  // namespace nlslab
