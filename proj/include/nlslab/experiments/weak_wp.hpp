#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "nlslab/diagnostics.hpp"
#include "nlslab/dynamics.hpp"
#include "nlslab/experiments/schedule.hpp"
#include "nlslab/report.hpp"

namespace nlslab {

enum class EscapeMode { none, modulation, translation };

struct WeakWpOptions {
  Sign sign = Sign::defocusing;
  double dt = 1e-3;
  std::size_t stride = 100;
  double mod_step = 8.0;    // k_n = 2 pi (mod_step * n) / L, a lattice frequency
  double trans_step = 8.0;  // x_n = trans_step * n
};

// smooth, compactly supported probe: 1 within `inner` of `center`, 0
// beyond `outer`
inline ComplexField make_probe(const Grid& g, double center, double inner,
                               double outer) {
  if (!(0.0 < inner && inner < outer))
    throw config_error("make_probe: need 0 < inner < outer");
  if (outer >= g.L / 2.0)
    throw config_error("probe support exceeds the grid");
  ComplexField f = ComplexField::zero(g);
  for (std::size_t m = 0; m < g.M; ++m) {
    const double d = g.dist(g.x(m), center);
    f.values[m] = smooth_step((outer - d) / (outer - inner));
  }
  return f;
}

// Escaping perturbations g_n = h e^{i k_n x} (modulation) or h(. - x_n)
// (translation) added to the limit data f; solve the N_n-truncated flows
// and track the probe pairings against the untruncated limit solution.
inline ExperimentReport run_weak_wp(const std::vector<ComplexField>& probes,
                                    const ComplexField& f,
                                    const ComplexField& escape_profile,
                                    EscapeMode mode,
                                    const std::vector<ScheduleEntry>& sched,
                                    double T, std::uint64_t seed = 0,
                                    const WeakWpOptions& opts = {}) {
  if (sched.empty()) throw config_error("weak-wp: schedule is empty");
  if (probes.empty()) throw config_error("weak-wp: no probes given");
  const Grid& g = f.grid;
  for (const ComplexField& psi : probes) {
    if (!(psi.grid == g)) throw config_error("weak-wp: probe grid mismatch");
    const ComplexField pp = as_physical(psi);
    std::size_t zeros = 0;
    for (const auto& v : pp.values)
      if (std::abs(v) == 0.0) ++zeros;
    if (zeros < pp.values.size() / 20)
      throw config_error("probe support exceeds the grid");
  }
  if (!(escape_profile.grid == g))
    throw config_error("weak-wp: escape profile grid mismatch");

  // untruncated limit solution from data f
  SolverConfig ucfg;
  ucfg.sign = opts.sign;
  ucfg.dt = opts.dt;
  ucfg.T = T;
  ucfg.stride = opts.stride;
  const Trajectory uinf = solve_bidirectional(f, ucfg);

  ExperimentReport rep;
  rep.experiment = "weak-wp";
  rep.seed = seed;
  std::vector<double> disc, kpar;
  for (const ScheduleEntry& e : sched) {
    if (!(e.N > 0.0)) throw config_error("weak-wp: schedule entry with N <= 0");
    ComplexField gn = ComplexField::zero(g);
    double par = 0.0;
    if (mode == EscapeMode::modulation) {
      const double k =
          2.0 * std::numbers::pi * opts.mod_step * static_cast<double>(e.n) / g.L;
      par = k;
      const ComplexField hp = as_physical(escape_profile);
      for (std::size_t m = 0; m < g.M; ++m)
        gn.values[m] = hp.values[m] * std::exp(std::complex<double>(0.0, k * g.x(m)));
    } else if (mode == EscapeMode::translation) {
      const double xn = opts.trans_step * static_cast<double>(e.n);
      par = xn;
      ComplexField hhat = as_spectral(escape_profile);
      for (std::size_t j = 0; j < g.M; ++j)
        hhat.values[j] *= std::exp(std::complex<double>(0.0, -g.xi(j) * xn));
      gn = as_physical(hhat);
    }
    ComplexField data = as_physical(f);
    const ComplexField gp = as_physical(gn);
    for (std::size_t m = 0; m < g.M; ++m) data.values[m] += gp.values[m];

    SolverConfig ncfg = ucfg;
    ncfg.truncation = Truncation::low_pass;
    ncfg.integrator = Integrator::strang_rk4;
    ncfg.N = e.N;
    const Trajectory un = solve_bidirectional(data, ncfg);
    if (un.size() != uinf.size())
      throw internal_error("weak-wp: snapshot counts diverged");

    double worst = 0.0;
    for (std::size_t s = 0; s < un.size(); ++s)
      for (const ComplexField& psi : probes)
        worst = std::max(worst, std::abs(pairing(psi, un.fields[s]) -
                                         pairing(psi, uinf.fields[s])));
    disc.push_back(worst);
    kpar.push_back(par);
  }
  rep.series["discrepancy"] = disc;
  rep.series["escape_parameter"] = kpar;
  rep.scalars["T"] = T;
  rep.scalars["final_discrepancy"] = disc.back();
  if (mode == EscapeMode::none) {
    rep.scalars["control_max_discrepancy"] = *std::max_element(disc.begin(), disc.end());
  } else {
    rep.verdicts["discrepancy_decreasing"] = strictly_decreasing(disc);
  }
  return rep;
}

}  // namespace nlslab
