#include "vch/potentials.hpp"

#include "vch/errors.hpp"

namespace vch {

namespace {

void require_grid(const GridField& rho, const ShortRangeKernel& ks) {
  if (!(rho.grid == ks.samples.grid)) throw DimensionError("potential: density and kernel grids differ");
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("potential: alpha must be positive");
}

}  // namespace

GridField short_potential(const GridField& rho, const ShortRangeKernel& ks, double alpha) {
  require_grid(rho, ks);
  require_alpha(alpha);
  std::vector<double> sym(ks.symbol.size());
  for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = ks.symbol[i] * ks.symbol[i] / (alpha * alpha);
  return apply_symbol(rho, sym);
}

GridField long_potential(const GridField& rho, const ShortRangeKernel& ks, const LongRangeKernel& kl,
                         double alpha) {
  require_grid(rho, ks);
  require_alpha(alpha);
  const auto wl = kl.symbol(alpha);
  std::vector<double> sym(ks.symbol.size());
  for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = -wl[i] * ks.symbol[i] * ks.symbol[i] / (alpha * alpha);
  return apply_symbol(rho, sym);
}

GridField limit_potential(const GridField& rho, const ShortRangeKernel& ks, double coefficient) {
  require_grid(rho, ks);
  const auto spec = spectrum(rho.grid);
  std::vector<double> sym(spec->modes);
  for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = coefficient * spec->k2(i) * ks.symbol[i] * ks.symbol[i];
  return apply_symbol(rho, sym);
}

PotentialOperator::PotentialOperator(const ShortRangeKernel& ks, const LongRangeKernel& kl, double alpha)
    : grid_(ks.samples.grid), alpha_(alpha) {
  require_alpha(alpha);
  if (!(kl.samples().grid == grid_)) throw DimensionError("potential: kernel grids differ");
  const auto wl = kl.symbol(alpha);
  const std::size_t n = ks.symbol.size();
  short_.resize(n);
  long_.resize(n);
  total_.resize(n);
  ws2_.resize(n);
  const double inv = 1.0 / (alpha * alpha);
  for (std::size_t i = 0; i < n; ++i) {
    ws2_[i] = ks.symbol[i] * ks.symbol[i];
    short_[i] = ws2_[i] * inv;
    long_[i] = -wl[i] * ws2_[i] * inv;
    total_[i] = (1.0 - wl[i]) * ws2_[i] * inv;
  }
}

GridField PotentialOperator::total(const GridField& rho) const {
  if (!(rho.grid == grid_)) throw DimensionError("potential: density on a different grid");
  return apply_symbol(rho, total_);
}

VectorField PotentialOperator::force(const GridField& rho) const {
  if (!(rho.grid == grid_)) throw DimensionError("potential: density on a different grid");
  const auto spec = spectrum(grid_);
  const auto hat = forward_transform(grid_, rho.values);
  VectorField out;
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    const auto& k = axis == 0 ? spec->kx : spec->ky;
    const auto& nyq = axis == 0 ? spec->nyquist_x : spec->nyquist_y;
    std::vector<Complex> f(hat.size());
    for (std::size_t i = 0; i < hat.size(); ++i) {
      f[i] = nyq[i] ? Complex{} : Complex(0.0, -k[i] * total_[i]) * hat[i];
    }
    out.emplace_back(grid_, inverse_transform(grid_, std::move(f)));
    out.back().check_finite("force");
  }
  return out;
}

PotentialFields PotentialOperator::assemble(const GridField& rho, std::optional<double> limit_coefficient) const {
  if (!(rho.grid == grid_)) throw DimensionError("potential: density on a different grid");
  PotentialFields p;
  p.alpha = alpha_;
  p.phi_short = apply_symbol(rho, short_);
  p.phi_long = apply_symbol(rho, long_);
  p.phi_total = GridField(grid_);
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    p.phi_total.values[i] = p.phi_short.values[i] + p.phi_long.values[i];
  }
  p.force = force(rho);
  if (limit_coefficient) {
    const auto spec = spectrum(grid_);
    std::vector<double> sym(spec->modes);
    for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = *limit_coefficient * spec->k2(i) * ws2_[i];
    p.limit_phi = apply_symbol(rho, sym);
  }
  return p;
}

}  // namespace vch
