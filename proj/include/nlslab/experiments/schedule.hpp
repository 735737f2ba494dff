#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "nlslab/cutoffs.hpp"
#include "nlslab/field.hpp"

namespace nlslab {

// One rung of the approximation ladder: frequency cutoff N, torus
// circumference L, pigeonhole parameter eta, and the line-surrogate factor
// kappa (the "line" is the kappa*L torus with compactly supported data).
struct ScheduleEntry {
  int n = 0;
  double N = 0.0;
  double L = 0.0;
  double eta = 0.0;
  int kappa = 8;
  std::size_t points_override = 0;  // 0 = derive from the Nyquist rule
};

// Smallest power of two with pi*M/L > 4N, so every low pass in use
// (including P_{<=2N}, whose symbol dies at 4N) annihilates the Nyquist
// mode.
inline std::size_t derive_points(double L, double N) {
  const double need = 4.0 * N * L / std::numbers::pi;
  std::size_t M = next_pow2(static_cast<std::size_t>(std::floor(need)) + 1);
  return std::max<std::size_t>(M, 8);
}

inline Grid schedule_torus_grid(const ScheduleEntry& e) {
  return make_grid(e.L, e.points_override ? e.points_override
                                          : derive_points(e.L, e.N));
}

inline Grid schedule_surrogate_grid(const ScheduleEntry& e) {
  const Grid t = schedule_torus_grid(e);
  return make_grid(e.L * static_cast<double>(e.kappa),
                   t.M * static_cast<std::size_t>(e.kappa));
}

// N strictly increasing, eta strictly decreasing, kappa >= 4, and the
// pigeonhole count K >= 16 M_bound^2 / eta on every entry.
inline void validate_schedule(const std::vector<ScheduleEntry>& sched,
                              double M_bound, double T) {
  if (sched.empty()) throw config_error("schedule is empty");
  for (std::size_t i = 0; i < sched.size(); ++i) {
    const ScheduleEntry& e = sched[i];
    if (!(e.N > 0.0) || !(e.L > 0.0) || !(e.eta > 0.0))
      throw config_error("schedule entry " + std::to_string(i) +
                         ": N, L, eta must be positive");
    if (e.kappa < 4)
      throw config_error("schedule entry " + std::to_string(i) +
                         ": kappa must be an integer >= 4");
    if (i > 0) {
      if (!(e.N > sched[i - 1].N))
        throw config_error("schedule: N must be strictly increasing");
      if (!(e.eta < sched[i - 1].eta))
        throw config_error("schedule: eta must be strictly decreasing");
    }
    const double ell = 20.0 * e.N * T / e.eta;
    const double K = std::floor((e.L / 4.0) / ell);
    if (K < 16.0 * M_bound * M_bound / e.eta)
      throw config_error("schedule entry " + std::to_string(i) +
                         " violates the pigeonhole count: K=" +
                         detail::fmt_double(K) + " < 16 M^2/eta=" +
                         detail::fmt_double(16.0 * M_bound * M_bound / e.eta));
  }
}

// Identification of the length-L torus with a window of the kappa*L
// surrogate.  The window occupies surrogate samples [0, M); torus sample
// (i0 + s) mod M sits at window offset s, with i0 the grid-snapped index
// of the selection center, so the cutoff's excluded zone falls at the
// window seam where every chi^j vanishes.
struct WindowEmbedding {
  Grid torus;
  Grid surrogate;
  std::size_t i0 = 0;

  static WindowEmbedding make(const Grid& torus, const Grid& surrogate,
                              double center) {
    if (surrogate.M % torus.M != 0 ||
        std::fabs(surrogate.dx() - torus.dx()) > 1e-12 * torus.dx())
      throw config_error("window embedding: grids are not commensurate");
    WindowEmbedding emb;
    emb.torus = torus;
    emb.surrogate = surrogate;
    const auto i = static_cast<long long>(std::llround(center / torus.dx()));
    emb.i0 = static_cast<std::size_t>(((i % static_cast<long long>(torus.M)) +
                                       static_cast<long long>(torus.M)) %
                                      static_cast<long long>(torus.M));
    return emb;
  }

  // torus field -> surrogate field supported on the window
  ComplexField lift(const ComplexField& f) const {
    const ComplexField p = as_physical(f);
    ComplexField out = ComplexField::zero(surrogate);
    for (std::size_t s = 0; s < torus.M; ++s)
      out.values[s] = p.values[(i0 + s) % torus.M];
    return out;
  }

  // surrogate field -> torus field assembled from the window samples
  ComplexField restrict_to_torus(const ComplexField& F) const {
    const ComplexField p = as_physical(F);
    ComplexField out = ComplexField::zero(torus);
    for (std::size_t s = 0; s < torus.M; ++s)
      out.values[(i0 + s) % torus.M] = p.values[s];
    return out;
  }

  // real samples (cutoffs) lifted to the window, zero beyond it
  std::vector<double> lift_samples(const std::vector<double>& chi) const {
    std::vector<double> out(surrogate.M, 0.0);
    for (std::size_t s = 0; s < torus.M; ++s)
      out[s] = chi[(i0 + s) % torus.M];
    return out;
  }
};

// sharp band projection onto {|xi_k| <= band}: the discrete realization of
// the constraint P_{>band} f = 0
inline ComplexField sharp_band_project(const ComplexField& f, double band) {
  ComplexField out = as_spectral(f);
  for (std::size_t j = 0; j < out.grid.M; ++j)
    if (std::fabs(out.grid.xi(j)) > band) out.values[j] = 0.0;
  return out;
}

}  // namespace nlslab
