#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "nlslab/field.hpp"
#include "nlslab/multiplier.hpp"
#include "nlslab/report.hpp"

namespace nlslab {

// Result of the pigeonhole scan: a subinterval I = [c-h, c+h] of
// [L/4, L/2] with h = 10*N*T/eta whose windowed mass obeys
// ||u0 * 1_I||_2 <= eta^{1/2}/4.
struct IntervalSelection {
  double center = 0.0;       // c
  double half_length = 0.0;  // h = 10*N*T/eta
  double sub_length = 0.0;   // 20*N*T/eta
  std::size_t index = 0;     // chosen subinterval index, first qualifying
  double boundary_mass = 0.0;  // ||u0 * 1_I||_2 on the chosen interval
  double L = 0.0;            // circumference of the selecting grid
};

// windowed L2 norm ||u * 1_[lo,hi)||_2 on u's grid (positions taken mod L)
inline double windowed_l2(const ComplexField& u, double lo, double hi) {
  const ComplexField up = as_physical(u);
  const Grid& g = u.grid;
  double acc = 0.0;
  for (std::size_t m = 0; m < g.M; ++m) {
    const double x = g.x(m);
    if (x >= lo && x < hi) acc += std::norm(up.values[m]);
  }
  return std::sqrt(acc * g.dx());
}

// Subdivide [L/4, L/2] into K disjoint subintervals of length 20*N*T/eta
// and return the first one carrying windowed mass at most eta^{1/2}/4.
// Requires K >= 16*M_bound^2/eta, the count that makes the mass-counting
// argument close: sum of the K windowed masses is at most M_bound^2, so
// some interval holds at most M_bound^2/K <= eta/16.
inline IntervalSelection pigeonhole_interval(const ComplexField& u0, double eta,
                                             double N, double T, double M_bound) {
  if (!(eta > 0.0) || !(N > 0.0) || !(T > 0.0) || !(M_bound > 0.0))
    throw config_error("pigeonhole_interval: eta, N, T, M_bound must be positive");
  const Grid& g = u0.grid;
  const double norm0 = windowed_l2(u0, 0.0, g.L);
  if (norm0 > M_bound * (1.0 + 1e-9))
    throw config_error("pigeonhole_interval: ||u0||_2 exceeds M_bound");
  const double ell = 20.0 * N * T / eta;
  const std::size_t K = static_cast<std::size_t>(std::floor((g.L / 4.0) / ell));
  if (static_cast<double>(K) < 16.0 * M_bound * M_bound / eta)
    throw config_error(
        "torus too small for (M,eta,N,T): " + std::to_string(K) +
        " subintervals of length " + detail::fmt_double(ell) +
        " fit in [L/4,L/2], need >= " +
        detail::fmt_double(16.0 * M_bound * M_bound / eta));

  const ComplexField up = as_physical(u0);
  const double bound = 0.25 * std::sqrt(eta);
  for (std::size_t j = 0; j < K; ++j) {
    const double lo = g.L / 4.0 + static_cast<double>(j) * ell;
    const double hi = lo + ell;
    double acc = 0.0;
    for (std::size_t m = 0; m < g.M; ++m) {
      const double x = g.x(m);
      if (x >= lo && x < hi) acc += std::norm(up.values[m]);
    }
    const double wm = std::sqrt(acc * g.dx());
    if (wm <= bound) {
      IntervalSelection sel;
      sel.center = lo + ell / 2.0;
      sel.half_length = ell / 2.0;
      sel.sub_length = ell;
      sel.index = j;
      sel.boundary_mass = wm;
      sel.L = g.L;
      return sel;
    }
  }
  throw internal_error("pigeonhole_interval: no qualifying subinterval despite count guard");
}

// One smooth cutoff level chi^j, j in {0..4}: as a function of the
// periodic distance d to the selection center,
//   chi^j = 0 for d <= (10-2j-1) w,  chi^j = 1 for d >= (10-2j) w,
// with a smooth_step transition of width w = N*T/eta.  Equivalently, on
// the line it equals 1 on [c-L+(10-2j)w, c-(10-2j)w] and vanishes outside
// the one-transition-wider interval.
struct CutoffFamily {
  Grid grid;
  int level = 0;               // j
  double center = 0.0;         // c
  double width = 0.0;          // w = N*T/eta
  double plateau_radius = 0.0; // (10-2j) w
  double zero_radius = 0.0;    // (10-2j-1) w
  double N = 0.0, T = 0.0, eta = 0.0;
  std::vector<double> values;  // chi sampled on the grid

  double profile(double x) const {
    const double d = grid.dist(x, center);
    return smooth_step((d - zero_radius) / width);
  }
  // analytic derivatives at position x; the periodic distance is piecewise
  // linear in x and both of its kinks fall inside flat regions of the step
  double profile_d1(double x) const {
    const double d = grid.dist(x, center);
    const double v = smooth_step_d1((d - zero_radius) / width) / width;
    double rel = std::fmod(x - center, grid.L);
    if (rel < 0.0) rel += grid.L;
    return rel < grid.L / 2.0 ? v : -v;  // distance grows to the right of c
  }
  double profile_d2(double x) const {
    const double d = grid.dist(x, center);
    return smooth_step_d2((d - zero_radius) / width) / (width * width);
  }
  double profile_d1_abs(double x) const { return std::fabs(profile_d1(x)); }
  double profile_d2_abs(double x) const { return std::fabs(profile_d2(x)); }
};

inline CutoffFamily build_cutoff(const IntervalSelection& sel, int j,
                                 const Grid& grid, double N, double T, double eta) {
  if (j < 0 || j > 4) throw config_error("build_cutoff: level j must be in {0..4}");
  if (!(N > 0.0) || !(T > 0.0) || !(eta > 0.0))
    throw config_error("build_cutoff: N, T, eta must be positive");
  CutoffFamily fam;
  fam.grid = grid;
  fam.level = j;
  fam.center = sel.center;
  fam.width = N * T / eta;
  fam.plateau_radius = (10.0 - 2.0 * j) * fam.width;
  fam.zero_radius = (10.0 - 2.0 * j - 1.0) * fam.width;
  fam.N = N;
  fam.T = T;
  fam.eta = eta;
  if (!(fam.plateau_radius < grid.L / 2.0))
    throw config_error("build_cutoff: plateau empty, grid circumference too small");
  fam.values.resize(grid.M);
  bool plateau_hit = false;
  for (std::size_t m = 0; m < grid.M; ++m) {
    fam.values[m] = fam.profile(grid.x(m));
    if (fam.values[m] == 1.0) plateau_hit = true;
  }
  if (!plateau_hit)
    throw config_error("build_cutoff: no grid point reaches the plateau");
  return fam;
}

// multiply a field by the sampled cutoff (or by 1-chi when complement)
inline ComplexField apply_cutoff(const CutoffFamily& fam, const ComplexField& f,
                                 bool complement = false) {
  if (!(fam.grid == f.grid))
    throw config_error("apply_cutoff: cutoff and field grids differ");
  ComplexField out = as_physical(f);
  for (std::size_t m = 0; m < out.grid.M; ++m)
    out.values[m] *= complement ? 1.0 - fam.values[m] : fam.values[m];
  return out;
}

// Derivative report: max |d^k chi| for k <= k_max via spectral
// differentiation of the sampled profile, together with the normalized
// ratios max|d^k chi| * (N*T)^k, which track eta^k across a family.
inline ExperimentReport cutoff_report(const CutoffFamily& fam, int k_max) {
  if (k_max < 0 || k_max > 4) throw config_error("cutoff_report: k_max must be in {0..4}");
  ExperimentReport rep;
  rep.experiment = "cutoff-report";
  ComplexField chi = ComplexField::zero(fam.grid, Rep::physical);
  for (std::size_t m = 0; m < fam.grid.M; ++m) chi.values[m] = fam.values[m];
  ComplexField hat = as_spectral(chi);
  std::vector<double> maxima, ratios;
  for (int k = 0; k <= k_max; ++k) {
    ComplexField der = hat;
    for (std::size_t j = 0; j < der.grid.M; ++j) {
      const std::complex<double> ixi(0.0, der.grid.xi(j));
      std::complex<double> p = 1.0;
      for (int q = 0; q < k; ++q) p *= ixi;
      der.values[j] *= p;
    }
    const ComplexField dphys = as_physical(der);
    double mx = 0.0;
    for (const auto& v : dphys.values) mx = std::max(mx, std::abs(v));
    maxima.push_back(mx);
    ratios.push_back(mx * std::pow(fam.N * fam.T, k));
  }
  rep.series["max_abs_derivative"] = maxima;
  rep.series["scaled_ratio"] = ratios;
  rep.scalars["level"] = fam.level;
  rep.scalars["width"] = fam.width;
  rep.scalars["eta"] = fam.eta;
  return rep;
}

}  // namespace nlslab
