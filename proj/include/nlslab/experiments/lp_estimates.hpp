#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "nlslab/diagnostics.hpp"
#include "nlslab/experiments/schedule.hpp"
#include "nlslab/report.hpp"
#include "nlslab/rng.hpp"

namespace nlslab {

struct LpEstimateOptions {
  double T = 0.2;
  double M_bound = 0.1;          // norm of the seeded selection data
  std::size_t mode_cap = 4096;   // largest operator dimension allowed
  double comm_bound_factor = 10.0;
};

namespace detail {

// window-torus low pass realized on the surrogate: restrict to the window
// (the first M samples), project on the length-L lattice, embed back
inline LinearOp op_window_low_pass(const WindowEmbedding& emb, double N) {
  const std::size_t Mt = emb.torus.M;
  const std::size_t Ms = emb.surrogate.M;
  std::vector<double> sym(Mt);
  for (std::size_t j = 0; j < Mt; ++j)
    sym[j] = low_pass_profile(emb.torus.xi(j) / N);
  auto apply = [Mt, Ms, sym](const CVec& v) {
    CVec w(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(Mt));
    FftPlans::instance().forward(w.data(), Mt);
    for (std::size_t j = 0; j < Mt; ++j) w[j] *= sym[j];
    FftPlans::instance().backward(w.data(), Mt);
    CVec out(Ms, 0.0);
    for (std::size_t s = 0; s < Mt; ++s) out[s] = w[s];
    return out;
  };
  return {Ms, apply, apply};  // real symbol, window transfer is isometric
}

}  // namespace detail

// Measured operator norms for the cutoff/projector interactions: the
// torus-vs-window projector difference, the commutators on both domains,
// and the mismatch chi^j P (1 - chi^i), each across the schedule, plus the
// N^{-1} ||grad chi|| commutator bound check.
inline ExperimentReport run_lp_estimates(const std::vector<ScheduleEntry>& sched,
                                         const std::vector<std::pair<int, int>>& jpairs,
                                         std::uint64_t seed,
                                         const LpEstimateOptions& opts = {}) {
  validate_schedule(sched, opts.M_bound, opts.T);
  std::vector<std::pair<int, int>> pairs = jpairs;
  if (pairs.empty()) pairs.push_back({2, 3});
  for (const auto& [j, i] : pairs)
    if (!(0 <= j && j < i && i <= 4))
      throw config_error("lp-check: pairs must satisfy 0 <= j < i <= 4");

  ExperimentReport rep;
  rep.experiment = "lp-check";
  rep.seed = seed;
  std::vector<double> e58, e59, e59_torus, e59_line, e510, dims;
  bool bound_ok = true, mismatch_ok = true;

  for (const ScheduleEntry& e : sched) {
    const Grid tg = schedule_torus_grid(e);
    const Grid sg = schedule_surrogate_grid(e);
    if (sg.M > opts.mode_cap)
      throw config_error("lp-check: operator dimension " + std::to_string(sg.M) +
                         " exceeds the cap " + std::to_string(opts.mode_cap));
    SeededRng rng(derive_seed(seed, static_cast<std::uint64_t>(e.n)));
    const ComplexField u0 =
        random_band_limited(tg, 2.0 * e.N, opts.M_bound, rng);
    const IntervalSelection sel =
        pigeonhole_interval(u0, e.eta, e.N, opts.T, opts.M_bound);
    std::vector<CutoffFamily> chi;
    for (int j = 0; j <= 4; ++j)
      chi.push_back(build_cutoff(sel, j, tg, e.N, opts.T, e.eta));
    const WindowEmbedding emb = WindowEmbedding::make(tg, sg, sel.center);

    const int j0 = pairs.front().first;
    const LinearOp chi_t = op_cutoff(chi[j0]);
    const LinearOp chi_s = op_multiply(emb.lift_samples(chi[j0].values));
    const LinearOp P_torus = op_low_pass(tg, e.N);
    const LinearOp P_line = op_low_pass(sg, e.N);
    const LinearOp P_window = detail::op_window_low_pass(emb, e.N);

    const double v58 = operator_norm(
        op_compose(op_compose(chi_s, op_subtract(P_line, P_window)), chi_s));
    const double ct = operator_norm(op_commutator(chi_t, P_torus));
    const double cl = operator_norm(op_commutator(chi_s, P_line));
    e58.push_back(v58);
    e59_torus.push_back(ct);
    e59_line.push_back(cl);
    e59.push_back(ct + cl);
    dims.push_back(static_cast<double>(sg.M));

    // commutator bound against the analytic profile derivative
    double dmax = 0.0;
    const double fine = tg.L / 262144.0;
    for (double x = 0.0; x < tg.L; x += fine)
      dmax = std::max(dmax, chi[j0].profile_d1_abs(x));
    const double bound = opts.comm_bound_factor / e.N * dmax;
    if (ct > bound || cl > bound) bound_ok = false;

    double worst_mismatch = 0.0;
    for (const auto& [j, i] : pairs) {
      const LinearOp cj = op_multiply(emb.lift_samples(chi[j].values));
      std::vector<double> ci_c = emb.lift_samples(chi[i].values);
      for (auto& v : ci_c) v = 1.0 - v;
      // beyond the window the lifted chi^i vanishes, so 1 - chi^i is 1 there
      const LinearOp ci = op_multiply(ci_c);
      const double mism = operator_norm(op_compose(op_compose(cj, P_line), ci));
      worst_mismatch = std::max(worst_mismatch, mism);
      const double comm_j =
          j == j0 ? cl
                  : operator_norm(op_commutator(
                        op_multiply(emb.lift_samples(chi[j].values)), P_line));
      if (mism > comm_j * (1.0 + 1e-10)) mismatch_ok = false;
    }
    e510.push_back(worst_mismatch);
  }

  rep.series["projector_difference"] = e58;
  rep.series["commutator_sum"] = e59;
  rep.series["commutator_torus"] = e59_torus;
  rep.series["commutator_line"] = e59_line;
  rep.series["mismatch"] = e510;
  rep.series["operator_dimension"] = dims;
  rep.scalars["T"] = opts.T;
  rep.verdicts["projector_difference_decreasing"] = strictly_decreasing(e58);
  rep.verdicts["commutator_decreasing"] = strictly_decreasing(e59);
  rep.verdicts["mismatch_decreasing"] = strictly_decreasing(e510);
  rep.verdicts["commutator_bound"] = bound_ok;
  rep.verdicts["mismatch_below_commutator"] = mismatch_ok;
  return rep;
}

}  // namespace nlslab
