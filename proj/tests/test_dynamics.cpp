#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "nlslab/diagnostics.hpp"
#include "nlslab/dynamics.hpp"
#include "nlslab/rng.hpp"

using namespace nlslab;
using std::numbers::pi;

namespace {

ComplexField plane_wave(const Grid& g, long k, std::complex<double> a) {
  ComplexField f = ComplexField::zero(g);
  const double xi = 2.0 * pi * static_cast<double>(k) / g.L;
  for (std::size_t m = 0; m < g.M; ++m)
    f.values[m] = a * std::exp(std::complex<double>(0.0, xi * g.x(m)));
  return f;
}

ComplexField soliton(const Grid& g, double t) {
  // closed-form soliton of i u_t + u_xx + |u|^2 u = 0, centered mid-torus
  ComplexField f = ComplexField::zero(g);
  const std::complex<double> phase = std::exp(std::complex<double>(0.0, t));
  for (std::size_t m = 0; m < g.M; ++m) {
    const double x = g.x(m) - g.L / 2.0;
    f.values[m] = std::sqrt(2.0) * phase / std::cosh(x);
  }
  return f;
}

double rel_l2_err(const ComplexField& a, const ComplexField& b) {
  const ComplexField ap = as_physical(a);
  const ComplexField bp = as_physical(b);
  double num = 0.0, den = 0.0;
  for (std::size_t m = 0; m < ap.grid.M; ++m) {
    num += std::norm(ap.values[m] - bp.values[m]);
    den += std::norm(bp.values[m]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  cfg.validate();

  SolverConfig bad = cfg;
  bad.integrator = Integrator::strang_rk4;
  REQUIRE_THROWS_AS(bad.validate(), config_error);

  SolverConfig tr = cfg;
  tr.truncation = Truncation::low_pass;
  tr.N = 2.0;
  REQUIRE_THROWS_AS(tr.validate(), config_error);  // needs rk4
  tr.integrator = Integrator::strang_rk4;
  tr.validate();
  tr.N = 0.0;
  REQUIRE_THROWS_AS(tr.validate(), config_error);

  SolverConfig dt_bad = cfg;
  dt_bad.dt = 2.0;
  dt_bad.T = 1.0;
  REQUIRE_THROWS_AS(dt_bad.validate(), config_error);
}

TEST_CASE("nonlinear_term") {
  const Grid g = make_grid(8.0, 16);
  SolverConfig cfg;

  SECTION("zero maps to zero") {
    const ComplexField z = ComplexField::zero(g);
    const ComplexField out = nonlinear_term(z, cfg);
    for (const auto& v : out.values) REQUIRE(std::abs(v) == 0.0);
  }

  SECTION("identity P on a constant") {
    ComplexField c = ComplexField::zero(g);
    const std::complex<double> a(0.6, -0.3);
    for (auto& v : c.values) v = a;
    const ComplexField out = nonlinear_term(c, cfg);
    const std::complex<double> expect =
        static_cast<double>(static_cast<int>(cfg.sign)) * std::norm(a) * a;
    for (const auto& v : out.values) REQUIRE(std::abs(v - expect) < 1e-14);
  }

  SECTION("truncated single mode matches the closed form") {
    SolverConfig tc;
    tc.truncation = Truncation::low_pass;
    tc.integrator = Integrator::strang_rk4;
    tc.N = 2.0;
    const std::complex<double> a(0.5, 0.25);
    const long k = 1;  // xi_1 = pi/4 <= N, symbol exactly 1 there
    const ComplexField u = plane_wave(g, k, a);
    const ComplexField out = nonlinear_term(u, tc);
    const ComplexField expect = plane_wave(g, k, std::norm(a) * a);
    REQUIRE(rel_l2_err(out, expect) < 1e-13);
  }

  SECTION("truncated random field matches a naive-DFT oracle") {
    SolverConfig tc;
    tc.truncation = Truncation::low_pass;
    tc.integrator = Integrator::strang_rk4;
    tc.N = 1.5;
    SeededRng rng(7);
    ComplexField u = ComplexField::zero(g);
    for (auto& v : u.values) v = 0.5 * rng.cnormal();

    // brute-force oracle built on O(M^2) DFT sums
    auto fwd = [&](const std::vector<std::complex<double>>& v) {
      std::vector<std::complex<double>> out(g.M, 0.0);
      for (std::size_t j = 0; j < g.M; ++j)
        for (std::size_t m = 0; m < g.M; ++m)
          out[j] += v[m] * std::exp(std::complex<double>(0.0, -g.xi(j) * g.x(m)));
      for (auto& c : out) c /= std::sqrt(static_cast<double>(g.M));
      return out;
    };
    auto bwd = [&](const std::vector<std::complex<double>>& v) {
      std::vector<std::complex<double>> out(g.M, 0.0);
      for (std::size_t m = 0; m < g.M; ++m)
        for (std::size_t j = 0; j < g.M; ++j)
          out[m] += v[j] * std::exp(std::complex<double>(0.0, g.xi(j) * g.x(m)));
      for (auto& c : out) c /= std::sqrt(static_cast<double>(g.M));
      return out;
    };
    auto project = [&](std::vector<std::complex<double>> v) {
      auto hat = fwd(v);
      for (std::size_t j = 0; j < g.M; ++j)
        hat[j] *= low_pass_profile(g.xi(j) / tc.N);
      return bwd(hat);
    };
    auto pu = project(u.values);
    std::vector<std::complex<double>> cu(g.M);
    for (std::size_t m = 0; m < g.M; ++m) cu[m] = std::norm(pu[m]) * pu[m];
    auto oracle = project(cu);

    const ComplexField out = nonlinear_term(u, tc);
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < g.M; ++m) {
      num += std::norm(out.values[m] - oracle[m]);
      den += std::norm(oracle[m]);
    }
    REQUIRE(std::sqrt(num / den) < 1e-12);
  }
}

TEST_CASE("step") {
  SECTION("zero field stays zero") {
    const Grid g = make_grid(16.0, 64);
    SolverConfig cfg;
    const ComplexField out = step(ComplexField::zero(g), cfg);
    for (const auto& v : out.values) REQUIRE(std::abs(v) == 0.0);
  }

  SECTION("plane wave, identity P: one step is exact") {
    const Grid g = make_grid(32.0, 256);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    const std::complex<double> a(0.5, 0.0);
    const double xi = 2.0 * pi * 3.0 / g.L;
    const ComplexField u = plane_wave(g, 3, a);
    const ComplexField out = step(u, cfg);
    const double omega = xi * xi + 1.0 * std::norm(a);  // k^2 + sigma |a|^2
    ComplexField expect = u;
    const auto ph = std::exp(std::complex<double>(0.0, -omega * cfg.dt));
    for (auto& v : expect.values) v *= ph;
    REQUIRE(rel_l2_err(out, expect) < 1e-13);
  }

  SECTION("Richardson: halving dt cuts the one-step defect ~8x") {
    const Grid g = make_grid(16.0, 128);
    SeededRng rng(3);
    const ComplexField u = random_band_limited(g, 4.0, 1.5, rng);
    for (Integrator integ :
         {Integrator::strang_exact_phase, Integrator::strang_rk4}) {
      SolverConfig cfg;
      cfg.integrator = integ;
      if (integ == Integrator::strang_rk4) {
        cfg.truncation = Truncation::low_pass;
        cfg.N = 8.0;
      }
      auto defect = [&](double dt) {
        SolverConfig c1 = cfg, c2 = cfg;
        c1.dt = dt;
        c2.dt = dt / 2.0;
        const ComplexField one = step(u, c1);
        const ComplexField two = step(step(u, c2), c2);
        return rel_l2_err(one, two);
      };
      const double d1 = defect(4e-2);
      const double d2 = defect(2e-2);
      REQUIRE(d1 / d2 == Catch::Approx(8.0).epsilon(0.3));
    }
  }
}

TEST_CASE("solve") {
  SECTION("zero data gives the zero trajectory") {
    const Grid g = make_grid(16.0, 64);
    SolverConfig cfg;
    cfg.T = 0.1;
    cfg.dt = 1e-2;
    cfg.stride = 5;
    const Trajectory traj = solve(ComplexField::zero(g), cfg);
    REQUIRE(traj.size() == 3);
    for (const auto& f : traj.fields)
      for (const auto& v : f.values) REQUIRE(std::abs(v) == 0.0);
  }

  SECTION("soliton: focusing closed form at T=1") {
    const Grid g = make_grid(64.0, 1024);
    SolverConfig cfg;
    cfg.sign = Sign::focusing;
    cfg.T = 1.0;
    cfg.dt = 1e-3;
    cfg.stride = 100;
    const Trajectory traj = solve(soliton(g, 0.0), cfg);
    REQUIRE(rel_l2_err(traj.fields.back(), soliton(g, cfg.T)) <= 1e-5);
    REQUIRE(traj.mass_drift <= 1e-12);
  }

  SECTION("second-order convergence against the soliton") {
    const Grid g = make_grid(64.0, 1024);
    std::vector<double> errs;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
      SolverConfig cfg;
      cfg.sign = Sign::focusing;
      cfg.T = 1.0;
      cfg.dt = dt;
      cfg.stride = static_cast<std::size_t>(std::llround(1.0 / dt));
      const Trajectory traj = solve(soliton(g, 0.0), cfg);
      errs.push_back(rel_l2_err(traj.fields.back(), soliton(g, cfg.T)));
    }
    // dt^2 scaling within a factor 2: successive ratios in [2, 8]
    for (std::size_t i = 1; i < errs.size(); ++i) {
      const double ratio = errs[i - 1] / errs[i];
      REQUIRE(ratio >= 2.0);
      REQUIRE(ratio <= 8.0);
    }
  }

  SECTION("mass conservation, truncated flow") {
    const Grid g = make_grid(32.0, 256);
    SeededRng rng(5);
    const ComplexField u0 = random_band_limited(g, 4.0, 1.4, rng);
    SolverConfig cfg;
    cfg.truncation = Truncation::low_pass;
    cfg.integrator = Integrator::strang_rk4;
    cfg.N = 4.0;
    cfg.T = 1.0;
    cfg.dt = 1e-3;
    cfg.stride = 100;
    const Trajectory traj = solve(u0, cfg);
    REQUIRE(traj.mass_drift <= 1e-8);
  }

  SECTION("energy drift, both acceptance scenarios") {
    {
      const Grid g = make_grid(32.0, 256);
      SolverConfig cfg;
      cfg.T = 1.0;
      cfg.dt = 1e-3;
      cfg.stride = 100;
      const ComplexField u0 = plane_wave(g, 3, 0.5);
      const Trajectory traj = solve(u0, cfg);
      const double e0 = energy(traj.fields.front(), cfg);
      for (const auto& f : traj.fields)
        REQUIRE(std::fabs(energy(f, cfg) - e0) <= 1e-6 * std::fabs(e0));
    }
    {
      const Grid g = make_grid(64.0, 1024);
      SolverConfig cfg;
      cfg.sign = Sign::focusing;
      cfg.T = 1.0;
      cfg.dt = 1e-3;
      cfg.stride = 100;
      const Trajectory traj = solve(soliton(g, 0.0), cfg);
      const double e0 = energy(traj.fields.front(), cfg);
      for (const auto& f : traj.fields)
        REQUIRE(std::fabs(energy(f, cfg) - e0) <= 1e-6 * std::fabs(e0));
    }
  }

  SECTION("time reversibility") {
    const Grid g = make_grid(32.0, 256);
    SeededRng rng(9);
    const ComplexField u0 = random_band_limited(g, 4.0, 1.0, rng);
    for (bool truncated : {false, true}) {
      SolverConfig cfg;
      if (truncated) {
        cfg.truncation = Truncation::low_pass;
        cfg.integrator = Integrator::strang_rk4;
        cfg.N = 4.0;
      }
      cfg.T = 0.5;
      cfg.dt = 1e-3;
      cfg.stride = 500;
      const Trajectory fwd = solve(u0, cfg);
      ComplexField back;
      integrate(fwd.fields.back(), cfg, -1.0, nullptr,
                [&](std::size_t, double, const ComplexField& u) { back = u; });
      REQUIRE(rel_l2_err(back, u0) <= 1e-9);
    }
  }

  SECTION("bidirectional trajectory covers [-T, T] uniformly") {
    const Grid g = make_grid(16.0, 64);
    SeededRng rng(11);
    const ComplexField u0 = random_band_limited(g, 2.0, 0.5, rng);
    SolverConfig cfg;
    cfg.T = 0.2;
    cfg.dt = 1e-2;
    cfg.stride = 5;
    const Trajectory traj = solve_bidirectional(u0, cfg);
    REQUIRE(traj.t0 == Catch::Approx(-0.2));
    REQUIRE(traj.size() == 9);
    REQUIRE(traj.time(4) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(rel_l2_err(traj.fields[4], u0) < 1e-14);
  }

  SECTION("guards") {
    const Grid g = make_grid(16.0, 64);
    SolverConfig cfg;
    cfg.T = 0.1;
    cfg.dt = 1e-2;
    cfg.stride = 3;  // does not divide 10 steps
    REQUIRE_THROWS_AS(solve(ComplexField::zero(g), cfg), config_error);

    SolverConfig cap;
    cap.T = 0.1;
    cap.dt = 1e-2;
    ComplexField big = ComplexField::zero(g);
    for (auto& v : big.values) v = 2.0;  // ||u0||_2 = 8 > default cap 4
    REQUIRE_THROWS_AS(solve(big, cap), config_error);
  }

  SECTION("blow-up names the time reached") {
    const Grid g = make_grid(16.0, 64);
    // constant field at the mass cap: the rk4 substep sees |u|^2 dt ~ 3.9,
    // outside its stability region, and the phase rotation amplifies
    ComplexField flat = ComplexField::zero(g);
    for (auto& v : flat.values) v = 0.99;
    SolverConfig cfg;
    cfg.sign = Sign::focusing;
    cfg.truncation = Truncation::low_pass;
    cfg.integrator = Integrator::strang_rk4;
    cfg.N = 4.0;
    cfg.T = 400.0;
    cfg.dt = 4.0;
    cfg.stride = 1;
    try {
      solve(flat, cfg);
      FAIL("expected numeric_error");
    } catch (const numeric_error& e) {
      REQUIRE(std::string(e.what()).find("blow-up at t=") != std::string::npos);
    }
  }
}

TEST_CASE("duhamel_residual") {
  SECTION("zero trajectory") {
    const Grid g = make_grid(16.0, 64);
    SolverConfig cfg;
    cfg.T = 0.1;
    cfg.dt = 1e-2;
    cfg.stride = 2;
    const Trajectory traj = solve(ComplexField::zero(g), cfg);
    REQUIRE(duhamel_residual(traj) == 0.0);
  }

  SECTION("linear run reduces to the group property") {
    const Grid g = make_grid(32.0, 256);
    SeededRng rng(13);
    const ComplexField u0 = random_band_limited(g, 4.0, 1.0, rng);
    SolverConfig cfg;
    cfg.coupling = 0.0;  // nonlinearity disabled via the test hook
    cfg.T = 1.0;
    cfg.dt = 1e-3;
    cfg.stride = 10;
    const Trajectory traj = solve(u0, cfg);
    REQUIRE(duhamel_residual(traj) <= 1e-12);
  }

  SECTION("plane-wave run with >= 100 quadrature nodes") {
    const Grid g = make_grid(32.0, 256);
    SolverConfig cfg;
    cfg.T = 1.0;
    cfg.dt = 1e-3;
    cfg.stride = 10;  // 101 snapshots
    const Trajectory traj = solve(plane_wave(g, 3, 0.5), cfg);
    REQUIRE(traj.size() == 101);
    const double r = duhamel_residual(traj);
    REQUIRE(r <= 1e-6);
    // trapezoid oracle: the integrand's only time dependence is the slow
    // phase e^{-i sigma |a|^2 s}, so the composite quadrature error is
    // T h^2/12 |a|^4 ||G||_2 with ||G||_2/||u0||_2 = |a|^2
    const double a2 = 0.25;
    const double h = traj.spacing;
    const double bound = cfg.T * h * h / 12.0 * (a2 * a2) * a2;
    REQUIRE(r <= bound * 1.05);
  }

  SECTION("too few snapshots is a configuration error") {
    const Grid g = make_grid(16.0, 64);
    SolverConfig cfg;
    cfg.T = 0.1;
    cfg.dt = 0.05;
    cfg.stride = 2;
    const Trajectory traj = solve(ComplexField::zero(g), cfg);  // 2 snapshots
    REQUIRE_THROWS_AS(duhamel_residual(traj), config_error);
  }
}
