#include <random>

#include "doctest.h"
#include "support.hpp"
#include "vch/errors.hpp"
#include "vch/macro.hpp"
#include "vch/potentials.hpp"

using namespace vch;
using vch::test::kPi;

namespace {

MacroState macro_state(GridField rho, double dt) {
  MacroState s;
  s.rho = std::move(rho);
  s.config.dt = dt;
  return s;
}

/// Cosine amplitude of mode k, relative to the mean.
double cos_amplitude(const GridField& rho, int k) {
  const auto& g = rho.grid;
  double c = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    c += rho.values[i] * std::cos(2.0 * kPi * k * g.coordinate(i) / g.period());
    mean += rho.values[i];
  }
  return 2.0 * c / mean;
}

double measured_rate(const MacroSolver& solver, double rho_bar, double dt, int steps) {
  const double a = 1e-4;
  auto s = macro_state(vch::test::single_mode(solver.grid(), a, 1, rho_bar), dt);
  for (int i = 0; i < steps; ++i) s = solver.step(std::move(s));
  return std::log(cos_amplitude(s.rho, 1) / a) / (dt * steps);
}

double predicted_rate(const ShortRangeKernel& ks, double D, double c, double rho_bar) {
  const double k = 2.0 * kPi;
  return -D * k * k - rho_bar * c * std::pow(k, 4) * ks.symbol[1] * ks.symbol[1];
}

/// max |coarse - fine| over the coarse nodes (fine grid has twice the nodes).
double nested_error(const GridField& coarse, const GridField& fine) {
  double e = 0.0;
  for (std::size_t i = 0; i < coarse.values.size(); ++i) e = std::max(e, std::abs(coarse.values[i] - fine.values[2 * i]));
  return e;
}

}  // namespace

TEST_CASE("uniform density is stationary") {
  const auto s = vch::test::make_setup();
  MacroSolver solver(s.ks, 1.0, limit_coefficient(s.kl));
  auto st = macro_state(GridField(s.sg, 0.7), 1e-3);
  for (int i = 0; i < 50; ++i) st = solver.step(std::move(st));
  for (double x : st.rho.values) CHECK(x == doctest::Approx(0.7).epsilon(1e-13));
  CHECK(solver.potential(st.rho).max_abs() < 1e-13);
}

TEST_CASE("linear dispersion relation") {
  const auto s = vch::test::make_setup();
  const double c = limit_coefficient(s.kl);
  for (double D : {1.0, 0.01}) {
    for (double rho_bar : {1.0, 2.0}) {
      MacroSolver solver(s.ks, D, c);
      const double lambda = predicted_rate(s.ks, D, c, rho_bar);
      CHECK(measured_rate(solver, rho_bar, 1e-4, 100) == doctest::Approx(lambda).epsilon(0.05));
    }
  }
}

TEST_CASE("dispersion distinguishes the limit coefficient") {
  // At small D the interaction term dominates the decay rate; doubling c must
  // be visible well outside the 5% band.
  const auto s = vch::test::make_setup();
  const double c = limit_coefficient(s.kl);
  MacroSolver doubled(s.ks, 0.01, 2.0 * c);
  const double lambda = predicted_rate(s.ks, 0.01, c, 1.0);
  CHECK(std::abs(measured_rate(doubled, 1.0, 1e-4, 100) / lambda - 1.0) > 0.5);
}

TEST_CASE("mass conservation and positivity") {
  const auto s = vch::test::make_setup();
  MacroSolver solver(s.ks, 0.05, 10.0 * limit_coefficient(s.kl));
  GridField rho(s.sg, 1e-6);
  for (std::size_t i = 40; i < 60; ++i) rho.values[i] = 3.0;
  auto st = macro_state(rho, 1e-4);
  double mass = st.rho.integral();
  for (int i = 0; i < 200; ++i) {
    st.config.dt = std::min(1e-4, solver.cfl_dt(st.rho, 0.9));
    st = solver.step(std::move(st));
    const double m = st.rho.integral();
    CHECK(std::abs(m - mass) < 1e-13 * mass);
    mass = m;
    CHECK(st.rho.min() >= 0.0);
  }
}

TEST_CASE("macro CFL violation") {
  const auto s = vch::test::make_setup();
  MacroSolver solver(s.ks, 1.0, 10.0 * limit_coefficient(s.kl));
  const auto rho = vch::test::single_mode(s.sg, 0.9, 3);
  const double limit = solver.cfl_dt(rho, 0.9);
  auto st = macro_state(rho, 2.0 * limit);
  try {
    (void)solver.step(st);
    FAIL("expected StepSizeError");
  } catch (const StepSizeError& e) {
    CHECK(e.suggested_dt() == doctest::Approx(limit).epsilon(1e-12));
  }
  st.config.dt = 0.0;
  CHECK_THROWS_AS(solver.step(st), ParameterError);
  CHECK_THROWS_AS(MacroSolver(s.ks, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(MacroSolver(s.ks, 1.0, -1.0), ConfigError);
}

TEST_CASE("diffusion-dominated self-convergence under parabolic refinement") {
  const double T = 0.01, D = 1.0;
  std::vector<GridField> sol;
  for (std::size_t n : {32, 64, 128, 256}) {
    const SpatialGrid g(1, n, 1.0);
    const auto ks = make_short_kernel(g, 1.0 / 32.0);
    MacroSolver solver(ks, D, 1e-4);
    const double dt = 4e-4 * std::pow(32.0 / static_cast<double>(n), 2);
    GridField rho(g);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.coordinate(i);
      rho.values[i] = 1.0 + 0.3 * std::cos(2.0 * kPi * x) + 0.2 * std::sin(6.0 * kPi * x);
    }
    sol.push_back(run_macro(solver, rho, T, {dt, 0.9}).final.rho);
  }
  const double e1 = nested_error(sol[0], sol[1]);
  const double e2 = nested_error(sol[1], sol[2]);
  const double e3 = nested_error(sol[2], sol[3]);
  CHECK(std::log2(e1 / e2) >= 1.9);
  CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("convective self-convergence") {
  const double T = 0.02;
  std::vector<GridField> sol;
  for (std::size_t n : {64, 128, 256, 512}) {
    const SpatialGrid g(1, n, 1.0);
    const auto ks = make_short_kernel(g, 1.0 / 32.0);
    MacroSolver solver(ks, 1e-3, 0.01);
    const double dt = 2e-4 * 64.0 / static_cast<double>(n);
    sol.push_back(run_macro(solver, vch::test::single_mode(g, 0.5), T, {dt, 0.9}).final.rho);
  }
  const double e1 = nested_error(sol[0], sol[1]);
  const double e2 = nested_error(sol[1], sol[2]);
  const double e3 = nested_error(sol[2], sol[3]);
  CHECK(std::log2(e1 / e2) >= 0.9);
  CHECK(std::log2(e2 / e3) >= 0.9);
}

TEST_CASE("surrogate free energy decreases on a smooth run") {
  const auto s = vch::test::make_setup();
  MacroSolver solver(s.ks, 0.1, limit_coefficient(s.kl));
  const auto run = run_macro(solver, vch::test::single_mode(s.sg, 0.4, 2), 0.05, {1e-4, 0.9});
  REQUIRE(run.records.size() > 2);
  for (std::size_t i = 0; i + 1 < run.records.size(); ++i) {
    CHECK(run.records[i + 1].free_energy_surrogate <= run.records[i].free_energy_surrogate + 1e-12);
  }
  CHECK(run.records.front().mass == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(run.records.back().min_rho > 0.0);
}

TEST_CASE("run_macro aligns checkpoints with steps") {
  const auto s = vch::test::make_setup();
  MacroSolver solver(s.ks, 1.0, limit_coefficient(s.kl));
  const auto run = run_macro(solver, vch::test::single_mode(s.sg, 0.1), 0.01, {3e-4, 0.9}, 8);
  CHECK(run.checkpoints.size() == 8);
  CHECK(run.final.steps % 7 == 0);
  CHECK(run.final.config.dt <= 3e-4);
  CHECK(run.final.time == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(run.records.size() == run.final.steps + 1);
  CHECK_THROWS_AS(run_macro(solver, GridField(s.sg, 1.0), 0.01, {1e-4, 0.9}, 1), ParameterError);
  CHECK_THROWS_AS(run_macro(solver, GridField(s.sg, 1.0), -1.0, {1e-4, 0.9}), ParameterError);
}
