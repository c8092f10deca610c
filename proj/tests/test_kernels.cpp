#include "doctest.h"
#include "support.hpp"
#include "vch/errors.hpp"

using namespace vch;

// Continuum ratios delta / R^2 of the bump exp(-1/(1 - |u|^2)), by
// high-precision quadrature (30 digits).
constexpr double kBumpDelta1d = 0.158113636263798230228050428159;
constexpr double kBumpDelta2d = 0.130655601710279323125398437647;

TEST_CASE("maxwellian moments") {
  for (double D : {1.0, 0.5, 2.0}) {
    const VelocityGrid vg(1, 64, 6.0 * std::sqrt(D));
    const auto M = make_maxwellian(vg, D);
    CHECK(std::abs(M.moments.mass - 1.0) < 1e-8);
    CHECK(std::abs(M.moments.mean[0]) < 1e-12);
    CHECK(std::abs(M.moments.second[0][0] - D) < 1e-6 * D);
  }
  const auto M2 = make_maxwellian(VelocityGrid(2, 32, 6.0), 1.0);
  CHECK(std::abs(M2.moments.mass - 1.0) < 1e-8);
  CHECK(std::abs(M2.moments.mean[1]) < 1e-12);
  CHECK(std::abs(M2.moments.second[0][1]) < 1e-12);
  CHECK(std::abs(M2.moments.second[1][1] - 1.0) < 1e-6);
  CHECK(M2.normalization == doctest::Approx(1.0 / (2.0 * vch::test::kPi)).epsilon(1e-8));
}

TEST_CASE("maxwellian tail mass") {
  // erfc(xi_max / sqrt(2 D)) and 1 - erf(.)^2
  CHECK(maxwellian_tail_mass(2.0, 1.0, 1) == doctest::Approx(0.0455002638963584144).epsilon(1e-13));
  CHECK(maxwellian_tail_mass(6.0, 1.0, 1) == doctest::Approx(1.9731752900753962814e-9).epsilon(1e-12));
  CHECK(maxwellian_tail_mass(6.0, 1.0, 2) == doctest::Approx(3.9463505762573718374e-9).epsilon(1e-12));
  CHECK(maxwellian_tail_mass(3.0, 2.0, 1) == doctest::Approx(0.0338948535246892729).epsilon(1e-13));
}

TEST_CASE("maxwellian rejects a short velocity box with the tail mass") {
  try {
    (void)make_maxwellian(VelocityGrid(1, 64, 2.0), 1.0);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("0.0455") != std::string::npos);
  }
  CHECK_THROWS_AS(make_maxwellian(VelocityGrid(1, 64, 6.0), -1.0), ConfigError);
}

TEST_CASE("short-range kernel moments") {
  const SpatialGrid g(1, 128, 1.0);
  const double sigma = 1.0 / 32.0;
  const auto ks = make_short_kernel(g, sigma);
  CHECK(std::abs(ks.moments.mass - 1.0) < 1e-12);
  CHECK(std::abs(ks.moments.mean[0]) < 1e-14);
  CHECK(ks.moments.second[0][0] == doctest::Approx(sigma * sigma).epsilon(1e-8));
  CHECK(ks.symbol[0] == doctest::Approx(1.0).epsilon(1e-14));
  // Gaussian symbol exp(-sigma^2 k^2 / 2) at k = 2 pi
  const double k = 2.0 * vch::test::kPi;
  CHECK(ks.symbol[1] == doctest::Approx(std::exp(-0.5 * sigma * sigma * k * k)).epsilon(1e-10));

  const auto ks2 = make_short_kernel(SpatialGrid(2, 64, 1.0), sigma);
  CHECK(std::abs(ks2.moments.second[0][1]) < 1e-14);
  CHECK(ks2.moments.second[1][1] == doctest::Approx(sigma * sigma).epsilon(1e-8));
}

TEST_CASE("short-range kernel width constraint") {
  const SpatialGrid g(1, 128, 1.0);
  CHECK_THROWS_AS(make_short_kernel(g, 0.5), ConfigError);
  CHECK_THROWS_AS(make_short_kernel(g, 0.0), ConfigError);
  CHECK_NOTHROW(make_short_kernel(g, 1.0 / 12.0));
}

TEST_CASE("long-range kernel moments match the continuum bump") {
  const SpatialGrid g(1, 128, 1.0);
  const double R = 1.0 / 8.0;
  const auto kl = make_long_kernel(g, R);
  CHECK(std::abs(kl.moments().mass - 1.0) < 1e-12);
  CHECK(std::abs(kl.moments().mean[0]) < 1e-15);
  CHECK(kl.delta() / (R * R) == doctest::Approx(kBumpDelta1d).epsilon(1e-5));

  const auto kl2 = make_long_kernel(SpatialGrid(2, 128, 1.0), R);
  CHECK(std::abs(kl2.moments().second[0][1]) < 1e-15);
  CHECK(kl2.moments().second[1][1] == doctest::Approx(kl2.delta()).epsilon(1e-12));
  CHECK(kl2.delta() / (R * R) == doctest::Approx(kBumpDelta2d).epsilon(1e-4));
}

TEST_CASE("scaled long-range symbol") {
  const SpatialGrid g(1, 128, 1.0);
  const auto kl = make_long_kernel(g, 1.0 / 8.0);
  const double k = 2.0 * vch::test::kPi;
  // (1 - w(alpha k)) / alpha^2 -> delta k^2 / 2 with an O(alpha^2) error
  std::vector<double> err;
  for (double alpha : {0.2, 0.1, 0.05, 0.025}) {
    const auto sym = kl.symbol(alpha);
    CHECK(sym[0] == doctest::Approx(1.0).epsilon(1e-14));
    err.push_back(std::abs((1.0 - sym[1]) / (alpha * alpha) - 0.5 * kl.delta() * k * k));
  }
  for (std::size_t i = 0; i + 1 < err.size(); ++i) CHECK(std::log2(err[i] / err[i + 1]) > 1.9);
  CHECK(kl.max_alpha() == doctest::Approx(1.0));
  CHECK_THROWS_AS(kl.symbol(1.5), ConfigError);
}

TEST_CASE("long-range kernel support constraints") {
  const SpatialGrid g(1, 128, 1.0);
  CHECK_THROWS_AS(make_long_kernel(g, 0.25), ConfigError);
  CHECK_THROWS_AS(make_long_kernel(g, 1.0 / 128.0), ConfigError);
  CHECK_THROWS_AS(make_long_kernel(g, -0.1), ConfigError);
}

TEST_CASE("stored moments match a recomputation from the samples") {
  for (int dim : {1, 2}) {
    const SpatialGrid g(dim, 64, 1.0);
    const auto ks = make_short_kernel(g, 1.0 / 32.0);
    const auto kl = make_long_kernel(g, 1.0 / 8.0);
    CHECK(spatial_moments(ks.samples) == ks.moments);
    CHECK(spatial_moments(kl.samples()) == kl.moments());
  }
}

TEST_CASE("scaled atoms carry the second moment alpha^2 delta") {
  const auto kl = make_long_kernel(SpatialGrid(1, 128, 1.0), 1.0 / 8.0);
  for (double alpha : {1.0, 0.5, 0.25}) {
    double mass = 0.0, first = 0.0, second = 0.0;
    for (const auto& a : kl.atoms()) {
      const double y = alpha * a.offset[0];
      mass += a.weight;
      first += a.weight * y;
      second += a.weight * y * y;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(first) < 1e-15);
    CHECK(second == doctest::Approx(alpha * alpha * kl.delta()).epsilon(1e-12));
  }
}

TEST_CASE("scaled long-range kernel converges to the identity at second order") {
  const SpatialGrid g(1, 128, 1.0);
  const auto kl = make_long_kernel(g, 1.0 / 8.0);
  GridField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = 2.0 * vch::test::kPi * g.coordinate(i);
    f.values[i] = std::sin(x) + 0.5 * std::cos(3.0 * x);
  }
  std::vector<double> err;
  for (double alpha : {0.2, 0.1, 0.05}) {
    const auto smoothed = apply_symbol(f, kl.symbol(alpha));
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(smoothed.values[i] - f.values[i]));
    err.push_back(e);
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.9);
  CHECK(std::log2(err[1] / err[2]) >= 1.9);
}
