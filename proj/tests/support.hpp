#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "vch/diagnostics.hpp"
#include "vch/domain.hpp"
#include "vch/kernels.hpp"
#include "vch/kinetic.hpp"

namespace vch::test {

inline constexpr double kPi = std::numbers::pi;

struct Setup {
  SpatialGrid sg;
  VelocityGrid vg;
  ShortRangeKernel ks;
  LongRangeKernel kl;
  Maxwellian M;
};

inline Setup make_setup(int dim = 1, std::size_t n = 128, std::size_t m = 64, double D = 1.0) {
  Setup s;
  s.sg = SpatialGrid(dim, n, 1.0);
  s.vg = VelocityGrid(dim, m, 6.0 * std::sqrt(D));
  s.ks = make_short_kernel(s.sg, 1.0 / 32.0);
  s.kl = make_long_kernel(s.sg, 1.0 / 8.0);
  s.M = make_maxwellian(s.vg, D);
  return s;
}

inline GridField single_mode(const SpatialGrid& g, double a, int k = 1, double rho_bar = 1.0) {
  GridField r(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double x = g.coordinate(g.index(c)[0]);
    r.values[c] = rho_bar * (1.0 + a * std::cos(2.0 * kPi * k * x / g.period()));
  }
  return r;
}

/// Smooth positive random density: a few random Fourier modes around rho_bar.
inline GridField random_density(const SpatialGrid& g, std::mt19937_64& gen, double amplitude = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GridField r(g, 1.0);
  for (int k = 1; k <= 5; ++k) {
    const double a = amplitude * u(gen) / k;
    const double ph = 2.0 * kPi * u(gen);
    for (std::size_t c = 0; c < g.size(); ++c) {
      const auto idx = g.index(c);
      const double x = g.coordinate(idx[0]) + (g.dim() == 2 ? 0.5 * g.coordinate(idx[1]) : 0.0);
      r.values[c] += a * std::cos(2.0 * kPi * k * x / g.period() + ph);
    }
  }
  return r;
}

/// f = rho(x) * Maxwellian with variance D2 (not renormalized to the grid).
inline PhaseField gaussian_phase(const GridField& rho, const VelocityGrid& vg, double D2, double shift = 0.0) {
  PhaseField f(rho.grid, vg);
  const double c = std::pow(2.0 * kPi * D2, -0.5 * vg.dim());
  for (std::size_t cell = 0; cell < rho.grid.size(); ++cell) {
    auto col = f.cell(cell);
    for (std::size_t v = 0; v < col.size(); ++v) {
      const auto xi = vg.velocity(v);
      const double r2 = (xi[0] - shift) * (xi[0] - shift) + xi[1] * xi[1];
      col[v] = rho.values[cell] * c * std::exp(-r2 / (2.0 * D2));
    }
  }
  return f;
}

}  // namespace vch::test
