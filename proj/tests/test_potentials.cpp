#include "doctest.h"
#include "support.hpp"
#include "vch/errors.hpp"
#include "vch/potentials.hpp"

using namespace vch;
using vch::test::kPi;

TEST_CASE("uniform density has zero force") {
  const auto s = vch::test::make_setup();
  const GridField rho(s.sg, 1.3);
  PotentialOperator op(s.ks, s.kl, 0.1);
  const auto p = op.assemble(rho, limit_coefficient(s.kl));
  CHECK(p.force[0].max_abs() < 1e-13);
  CHECK(p.limit_phi->max_abs() < 1e-13);
  // phi_total is constant: (1 - 1) * mass / alpha^2 = 0
  CHECK(p.phi_total.max_abs() < 1e-10);
}

TEST_CASE("composite potential pieces") {
  const auto s = vch::test::make_setup();
  const auto rho = vch::test::single_mode(s.sg, 0.2, 2);
  const double alpha = 0.2;
  PotentialOperator op(s.ks, s.kl, alpha);
  const auto p = op.assemble(rho);
  const auto ps = short_potential(rho, s.ks, alpha);
  const auto pl = long_potential(rho, s.ks, s.kl, alpha);
  const auto grad = gradient(p.phi_total);
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    CHECK(p.phi_short.values[i] == doctest::Approx(ps.values[i]).epsilon(1e-12));
    CHECK(p.phi_long.values[i] == doctest::Approx(pl.values[i]).epsilon(1e-12));
    CHECK(p.phi_total.values[i] == doctest::Approx(ps.values[i] + pl.values[i]).epsilon(1e-12));
    CHECK(p.force[0].values[i] == doctest::Approx(-grad[0].values[i]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("single-mode potential matches its symbol") {
  const auto s = vch::test::make_setup();
  const double a = 0.1, alpha = 0.1, k = 2.0 * kPi;
  const auto rho = vch::test::single_mode(s.sg, a);
  PotentialOperator op(s.ks, s.kl, alpha);
  const auto phi = op.total(rho);
  const double wl = s.kl.symbol(alpha)[1];
  const double ws = s.ks.symbol[1];
  const double amp = a * (1.0 - wl) * ws * ws / (alpha * alpha);
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    const double x = s.sg.coordinate(i);
    CHECK(phi.values[i] == doctest::Approx(amp * std::cos(k * x)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("potential converges to the limit potential at second order") {
  const auto s = vch::test::make_setup();
  const auto rho = vch::test::single_mode(s.sg, 0.1);
  const auto limit = limit_potential(rho, s.ks, limit_coefficient(s.kl));
  std::vector<double> err;
  for (double alpha : {0.2, 0.1, 0.05, 0.025}) {
    const auto phi = PotentialOperator(s.ks, s.kl, alpha).total(rho);
    double e = 0.0;
    for (std::size_t i = 0; i < rho.values.size(); ++i) e = std::max(e, std::abs(phi.values[i] - limit.values[i]));
    err.push_back(e);
  }
  for (std::size_t i = 0; i + 1 < err.size(); ++i) CHECK(std::log2(err[i] / err[i + 1]) > 1.9);
}

TEST_CASE("potential errors") {
  const auto s = vch::test::make_setup();
  CHECK_THROWS_AS(PotentialOperator(s.ks, s.kl, 0.0), ParameterError);
  CHECK_THROWS_AS(PotentialOperator(s.ks, s.kl, 2.0), ConfigError);
  const GridField other(SpatialGrid(1, 64, 1.0), 1.0);
  PotentialOperator op(s.ks, s.kl, 0.1);
  CHECK_THROWS_AS(op.force(other), DimensionError);
}
