#include <algorithm>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "vch/errors.hpp"

using namespace vch;
using vch::test::kPi;

namespace {

KineticState make_state(PhaseField f, double eps, double alpha, double dt) {
  KineticState s;
  s.f = std::move(f);
  s.eps = eps;
  s.alpha = alpha;
  s.config.dt = dt;
  return s;
}

double max_diff(const PhaseField& a, const PhaseField& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) e = std::max(e, std::abs(a.values[i] - b.values[i]));
  return e;
}

double min_entry(const PhaseField& f) { return *std::min_element(f.values.begin(), f.values.end()); }

bool all_finite(const PhaseField& f) {
  return std::all_of(f.values.begin(), f.values.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

TEST_CASE("uniform local equilibrium is a fixed point") {
  const auto s = vch::test::make_setup(1, 64, 64);
  const auto f0 = well_prepared(GridField(s.sg, 1.7), s.M);
  for (auto flux : {XiFlux::upwind, XiFlux::logmean}) {
    for (auto xt : {XTransport::spectral, XTransport::semi_lagrangian}) {
      KineticStepper stepper(s.M, s.ks, s.kl, 0.2);
      auto st = make_state(f0, 0.2, 0.2, 0.005);
      st.config.xi_flux = flux;
      st.config.x_transport = xt;
      for (int i = 0; i < 20; ++i) st = stepper.step(std::move(st));
      CHECK(max_diff(st.f, f0) < 1e-12);
      CHECK(st.audit.clipped_entries == 0);
    }
  }
}

TEST_CASE("relaxation alone matches the closed form") {
  const auto s = vch::test::make_setup(1, 16, 64);
  const auto rho = vch::test::single_mode(s.sg, 0.3);
  const auto f0 = vch::test::gaussian_phase(rho, s.vg, 0.5, 0.3);
  const auto r0 = compute_rho(f0);
  const double eps = 0.1, dt = 0.003;
  KineticStepper stepper(s.M, s.ks, s.kl, eps);
  auto st = make_state(f0, eps, eps, dt);
  st.config.x_transport_enabled = false;
  st.config.xi_transport_enabled = false;
  for (int i = 0; i < 5; ++i) st = stepper.step(std::move(st));
  const double decay = std::exp(-5.0 * dt / (eps * eps));
  for (std::size_t c = 0; c < s.sg.size(); ++c) {
    const auto col = st.f.cell(c);
    const auto col0 = f0.cell(c);
    for (std::size_t v = 0; v < col.size(); ++v) {
      const double eq = r0.values[c] * s.M.samples[v];
      CHECK(col[v] == doctest::Approx(eq + (col0[v] - eq) * decay).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("spectral free streaming is an exact shift") {
  const auto s = vch::test::make_setup(1, 32, 8);
  PhaseField f0(s.sg, s.vg);
  for (std::size_t c = 0; c < s.sg.size(); ++c) {
    for (std::size_t v = 0; v < 8; ++v) f0.cell(c)[v] = 2.0 + std::sin(2.0 * kPi * (s.sg.coordinate(c) + 0.1 * v));
  }
  const double eps = 0.5, dt = 0.01;
  KineticStepper stepper(s.M, s.ks, s.kl, eps);
  auto st = make_state(f0, eps, eps, dt);
  st.config.xi_transport_enabled = false;
  st.config.relaxation_enabled = false;
  for (int i = 0; i < 7; ++i) st = stepper.step(std::move(st));
  const double t = 7.0 * dt;
  for (std::size_t c = 0; c < s.sg.size(); ++c) {
    for (std::size_t v = 0; v < 8; ++v) {
      const double x = s.sg.coordinate(c) - s.vg.node(v) * t / eps;
      CHECK(st.f.cell(c)[v] == doctest::Approx(2.0 + std::sin(2.0 * kPi * (x + 0.1 * v))).epsilon(1e-11));
    }
  }
}

TEST_CASE("mass is conserved over many steps") {
  const auto s = vch::test::make_setup(1, 64, 48);
  std::mt19937_64 gen(5);
  const auto rho = vch::test::random_density(s.sg, gen, 0.5);
  for (auto flux : {XiFlux::upwind, XiFlux::logmean}) {
    const double eps = 0.1;
    KineticStepper stepper(s.M, s.ks, s.kl, eps);
    auto st = make_state(well_prepared(rho, s.M), eps, eps, 0.002);
    st.config.xi_flux = flux;
    const double m0 = st.f.integral();
    for (int i = 0; i < 100; ++i) st = stepper.step(std::move(st));
    CHECK(std::abs(st.f.integral() - m0 - st.audit.clipped_mass) < 1e-12 * m0);
    CHECK(std::abs(st.audit.clipped_mass) < 1e-12 * m0);
    CHECK(min_entry(st.f) >= 0.0);
    CHECK(st.steps == 100);
    CHECK(st.time == doctest::Approx(0.2));
  }
}

TEST_CASE("xi transport CFL violation suggests a step") {
  const auto s = vch::test::make_setup(1, 64, 64);
  const auto f0 = well_prepared(vch::test::single_mode(s.sg, 0.5), s.M);
  const double eps = 0.1;
  KineticStepper stepper(s.M, s.ks, s.kl, eps);
  const double limit = stepper.cfl_dt(f0, eps, 0.9);
  REQUIRE(limit > 0.0);
  auto st = make_state(f0, eps, eps, 4.0 * limit);
  try {
    (void)stepper.step(st);
    FAIL("expected StepSizeError");
  } catch (const StepSizeError& e) {
    CHECK(e.suggested_dt() == doctest::Approx(limit).epsilon(1e-12));
  }
  st.config.dt = 0.99 * limit;
  CHECK_NOTHROW(stepper.step(st));
  st.config.dt = -1.0;
  CHECK_THROWS_AS(stepper.step(st), ParameterError);
}

TEST_CASE("stepper rejects mismatched state") {
  const auto s = vch::test::make_setup(1, 64, 64);
  KineticStepper stepper(s.M, s.ks, s.kl, 0.1);
  auto st = make_state(well_prepared(GridField(s.sg, 1.0), s.M), 0.1, 0.2, 0.001);
  CHECK_THROWS_AS(stepper.step(st), ParameterError);
  const auto other = vch::test::make_setup(1, 32, 64);
  auto st2 = make_state(well_prepared(GridField(other.sg, 1.0), other.M), 0.1, 0.1, 0.001);
  CHECK_THROWS_AS(stepper.step(st2), DimensionError);
}

TEST_CASE("density and flux moments") {
  const auto s = vch::test::make_setup(1, 32, 96);
  const auto rho = vch::test::single_mode(s.sg, 0.4);
  const auto f = well_prepared(rho, s.M);
  const auto r = compute_rho(f);
  for (std::size_t c = 0; c < rho.values.size(); ++c) CHECK(r.values[c] == doctest::Approx(rho.values[c]).epsilon(1e-14));
  CHECK(compute_flux(f, s.M, 0.1, 1.0).J[0].max_abs() < 1e-14);

  // shifted Maxwellian: J = rho u / eps
  const double u = 0.1, eps = 0.2;
  const auto fs = vch::test::gaussian_phase(rho, s.vg, 1.0, u);
  const auto flux = compute_flux(fs, s.M, eps, 0.5);
  for (std::size_t c = 0; c < rho.values.size(); ++c) {
    CHECK(flux.J[0].values[c] == doctest::Approx(rho.values[c] * u / eps).epsilon(0.05));
    CHECK(flux.J[0].values[c] == doctest::Approx(flux.J1[0].values[c] + flux.J2[0].values[c]).epsilon(1e-13));
  }
  CHECK(flux.r == 0.5);
}

TEST_CASE("initial data validation") {
  const auto s = vch::test::make_setup(1, 64, 32);
  const std::vector<double> alphas{0.2, 0.1, 0.05};
  auto f = well_prepared(GridField(s.sg, 1.0), s.M);
  const auto rep = validate_initial(f, s.ks, s.kl, alphas);
  CHECK(rep.entropy_finite);
  CHECK(rep.zero_entries == 0);
  CHECK(rep.interaction.size() == 3);
  CHECK(rep.interaction_sup < 1e-12);
  // 1 + |xi|^2 contributes mass + d D; the log term is positive
  CHECK(rep.moment_functional > 2.0 * 0.999);

  f.cell(3)[4] = 0.0;
  CHECK(validate_initial(f, s.ks, s.kl, alphas).zero_entries == 1);
  f.cell(3)[4] = -1e-3;
  CHECK_THROWS_AS(validate_initial(f, s.ks, s.kl, alphas), ValidationError);
}

TEST_CASE("initial interaction functional is stable in alpha") {
  const auto s = vch::test::make_setup(1, 64, 32);
  const double a = 0.2, k = 2.0 * kPi;
  const auto f = well_prepared(vch::test::single_mode(s.sg, a), s.M);
  const std::vector<double> alphas{0.2, 0.1, 0.05};
  const auto rep = validate_initial(f, s.ks, s.kl, alphas);

  // Oracle: g = rho * wS is a trigonometric polynomial, so g(x - alpha y) is
  // evaluated exactly off the grid and the double integral summed directly.
  double ws = 0.0;
  for (std::size_t i = 0; i < s.sg.size(); ++i) ws += s.ks.samples.values[i] * std::cos(k * s.sg.coordinate(i)) * s.sg.spacing();
  const auto g = [&](double x) { return 1.0 + a * ws * std::cos(k * x); };
  const double limit = a * a * ws * ws * 0.5 * k * k * s.kl.delta();
  REQUIRE(rep.interaction.size() == alphas.size());
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const double alpha = alphas[j];
    double sum = 0.0;
    for (const auto& atom : s.kl.atoms()) {
      for (std::size_t i = 0; i < s.sg.size(); ++i) {
        const double x = s.sg.coordinate(i);
        const double d = g(x) - g(x - alpha * atom.offset[0]);
        sum += atom.weight * d * d * s.sg.spacing();
      }
    }
    const double oracle = sum / (alpha * alpha);
    CHECK(rep.interaction[j].first == alpha);
    CHECK(rep.interaction[j].second == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(std::abs(rep.interaction[j].second - limit) < 0.2 * limit);
  }
}

TEST_CASE("semi-lagrangian transport stays nonnegative") {
  const auto s = vch::test::make_setup(1, 64, 32);
  GridField rho(s.sg, 1e-3);
  for (std::size_t i = 20; i < 28; ++i) rho.values[i] = 2.0;
  const double eps = 0.2;
  KineticStepper stepper(s.M, s.ks, s.kl, eps);
  auto st = make_state(well_prepared(rho, s.M), eps, eps, 0.003);
  st.config.x_transport = XTransport::semi_lagrangian;
  const double m0 = st.f.integral();
  for (int i = 0; i < 40; ++i) st = stepper.step(std::move(st));
  CHECK(min_entry(st.f) >= 0.0);
  CHECK(st.audit.violations == 0);
  CHECK(st.audit.clipped_entries == 0);
  // monotone interpolation is bounded but not conservative
  CHECK(std::abs(st.f.integral() - m0) < 1e-2 * m0);
}

TEST_CASE("two-dimensional smoke run") {
  const auto s = vch::test::make_setup(2, 16, 16);
  const auto rho = vch::test::single_mode(s.sg, 0.2);
  const double eps = 0.2;
  KineticStepper stepper(s.M, s.ks, s.kl, eps);
  auto st = make_state(well_prepared(rho, s.M), eps, eps, 0.005);
  const double m0 = st.f.integral();
  for (int i = 0; i < 5; ++i) st = stepper.step(std::move(st));
  CHECK(all_finite(st.f));
  CHECK(std::abs(st.f.integral() - m0) < 1e-12 * m0);
  CHECK(min_entry(st.f) >= 0.0);
}
