#include "vch/domain.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "vch/errors.hpp"

namespace vch {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW planning is not thread safe; execution with the new-array interface is.
// Plans are created once per (dim, n, direction) and never destroyed.
struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int dim, std::size_t n) {
  static std::map<std::pair<int, std::size_t>, PlanPair> cache;
  std::lock_guard lock(plan_mutex());
  auto key = std::make_pair(dim, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const auto ni = static_cast<int>(n);
  const std::size_t real_size = dim == 1 ? n : n * n;
  const std::size_t half_size = dim == 1 ? n / 2 + 1 : n * (n / 2 + 1);
  std::vector<double> rbuf(real_size);
  std::vector<Complex> cbuf(half_size);
  auto* cptr = reinterpret_cast<fftw_complex*>(cbuf.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  if (dim == 1) {
    p.r2c = fftw_plan_dft_r2c_1d(ni, rbuf.data(), cptr, flags);
    p.c2r = fftw_plan_dft_c2r_1d(ni, cptr, rbuf.data(), flags | FFTW_DESTROY_INPUT);
  } else {
    p.r2c = fftw_plan_dft_r2c_2d(ni, ni, rbuf.data(), cptr, flags);
    p.c2r = fftw_plan_dft_c2r_2d(ni, ni, cptr, rbuf.data(), flags | FFTW_DESTROY_INPUT);
  }
  if (p.r2c == nullptr || p.c2r == nullptr) throw Error("FFTW planning failed");
  return cache.emplace(key, p).first->second;
}

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* op) {
  if (!(a == b)) throw DimensionError(std::string(op) + ": fields live on different grids");
}

}  // namespace

// ---------------------------------------------------------------------------

SpatialGrid::SpatialGrid(int dim, std::size_t n, double period) : dim_(dim), n_(n), period_(period) {
  if (dim != 1 && dim != 2) throw ConfigError("spatial grid: dim must be 1 or 2");
  if (!is_power_of_two(n) || n < 4) throw ConfigError("spatial grid: n must be a power of two >= 4");
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("spatial grid: period must be positive");
}

double SpatialGrid::cell_volume() const noexcept { return std::pow(spacing(), dim_); }
double SpatialGrid::volume() const noexcept { return std::pow(period_, dim_); }
std::size_t SpatialGrid::size() const noexcept { return dim_ == 1 ? n_ : n_ * n_; }

std::array<std::size_t, 2> SpatialGrid::index(std::size_t flat) const noexcept {
  if (dim_ == 1) return {flat, 0};
  return {flat / n_, flat % n_};
}

std::size_t SpatialGrid::flat(std::size_t i, std::size_t j) const noexcept {
  return dim_ == 1 ? i : i * n_ + j;
}

double SpatialGrid::offset(std::size_t i) const noexcept {
  const auto ii = static_cast<long>(i % n_);
  const auto nn = static_cast<long>(n_);
  const long s = ii >= nn / 2 ? ii - nn : ii;
  return spacing() * static_cast<double>(s);
}

VelocityGrid::VelocityGrid(int dim, std::size_t m, double xi_max) : dim_(dim), m_(m), xi_max_(xi_max) {
  if (dim != 1 && dim != 2) throw ConfigError("velocity grid: dim must be 1 or 2");
  if (m < 2 || m % 2 != 0) throw ConfigError("velocity grid: m must be even and >= 2");
  if (!(xi_max > 0.0) || !std::isfinite(xi_max)) throw ConfigError("velocity grid: xi_max must be positive");
}

double VelocityGrid::weight() const noexcept { return std::pow(spacing(), dim_); }
std::size_t VelocityGrid::size() const noexcept { return dim_ == 1 ? m_ : m_ * m_; }

std::array<double, 2> VelocityGrid::velocity(std::size_t flat) const noexcept {
  if (dim_ == 1) return {node(flat), 0.0};
  return {node(flat / m_), node(flat % m_)};
}

// ---------------------------------------------------------------------------

GridField::GridField(const SpatialGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw DimensionError("grid field: value count does not match grid");
}

double GridField::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_volume();
}

double GridField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double GridField::min() const { return *std::min_element(values.begin(), values.end()); }

void GridField::check_finite(const char* context) const {
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError(std::string(context) + ": non-finite value in field");
  }
}

PhaseField::PhaseField(const SpatialGrid& s, const VelocityGrid& v, double fill)
    : sgrid(s), vgrid(v), values(s.size() * v.size(), fill) {
  if (s.dim() != v.dim()) throw DimensionError("phase field: spatial and velocity dims differ");
}

double PhaseField::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * sgrid.cell_volume() * vgrid.weight();
}

// ---------------------------------------------------------------------------

std::shared_ptr<const Spectrum> spectrum(const SpatialGrid& grid) {
  static std::map<std::tuple<int, std::size_t, double>, std::shared_ptr<const Spectrum>> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto key = std::make_tuple(grid.dim(), grid.n(), grid.period());
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto s = std::make_shared<Spectrum>();
  s->grid = grid;
  const std::size_t n = grid.n();
  const std::size_t h = n / 2 + 1;
  const double k0 = 2.0 * std::numbers::pi / grid.period();
  auto wave = [&](std::size_t i) {
    const long ii = static_cast<long>(i);
    const long nn = static_cast<long>(n);
    return k0 * static_cast<double>(ii <= nn / 2 ? ii : ii - nn);
  };
  if (grid.dim() == 1) {
    s->modes = h;
    for (std::size_t i = 0; i < h; ++i) {
      s->kx.push_back(k0 * static_cast<double>(i));
      s->ky.push_back(0.0);
      s->nyquist_x.push_back(i == n / 2);
      s->nyquist_y.push_back(false);
      s->multiplicity.push_back(i == 0 || i == n / 2 ? 1.0 : 2.0);
    }
  } else {
    s->modes = n * h;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < h; ++j) {
        s->kx.push_back(wave(i));
        s->ky.push_back(k0 * static_cast<double>(j));
        s->nyquist_x.push_back(i == n / 2);
        s->nyquist_y.push_back(j == n / 2);
        s->multiplicity.push_back(j == 0 || j == n / 2 ? 1.0 : 2.0);
      }
    }
  }
  cache.emplace(key, s);
  return s;
}

std::vector<Complex> forward_transform(const SpatialGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) throw DimensionError("forward transform: size mismatch");
  const auto& p = plans_for(grid.dim(), grid.n());
  const std::size_t half = grid.dim() == 1 ? grid.n() / 2 + 1 : grid.n() * (grid.n() / 2 + 1);
  std::vector<double> in(values.begin(), values.end());
  std::vector<Complex> out(half);
  fftw_execute_dft_r2c(p.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> inverse_transform(const SpatialGrid& grid, std::vector<Complex> coefficients) {
  const auto& p = plans_for(grid.dim(), grid.n());
  std::vector<double> out(grid.size());
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(coefficients.data()), out.data());
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> kernel_symbol(const GridField& kernel) {
  auto hat = forward_transform(kernel.grid, kernel.values);
  std::vector<double> sym(hat.size());
  const double dv = kernel.grid.cell_volume();
  for (std::size_t i = 0; i < hat.size(); ++i) sym[i] = dv * hat[i].real();
  return sym;
}

GridField apply_symbol(const GridField& a, std::span<const double> symbol) {
  auto hat = forward_transform(a.grid, a.values);
  if (symbol.size() != hat.size()) throw DimensionError("apply_symbol: symbol size mismatch");
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= symbol[i];
  return GridField(a.grid, inverse_transform(a.grid, std::move(hat)));
}

GridField convolve(const GridField& a, const GridField& b) {
  require_same_grid(a.grid, b.grid, "convolve");
  auto ah = forward_transform(a.grid, a.values);
  auto bh = forward_transform(b.grid, b.values);
  const double dv = a.grid.cell_volume();
  for (std::size_t i = 0; i < ah.size(); ++i) ah[i] *= bh[i] * dv;
  GridField out(a.grid, inverse_transform(a.grid, std::move(ah)));
  out.check_finite("convolve");
  return out;
}

VectorField gradient(const GridField& a) {
  const auto spec = spectrum(a.grid);
  const auto hat = forward_transform(a.grid, a.values);
  VectorField out;
  for (int axis = 0; axis < a.grid.dim(); ++axis) {
    const auto& k = axis == 0 ? spec->kx : spec->ky;
    const auto& nyq = axis == 0 ? spec->nyquist_x : spec->nyquist_y;
    std::vector<Complex> d(hat.size());
    for (std::size_t i = 0; i < hat.size(); ++i) d[i] = nyq[i] ? Complex{} : Complex(0.0, k[i]) * hat[i];
    out.emplace_back(a.grid, inverse_transform(a.grid, std::move(d)));
    out.back().check_finite("gradient");
  }
  return out;
}

GridField divergence(const VectorField& v) {
  if (v.empty()) throw DimensionError("divergence: empty vector field");
  const SpatialGrid& grid = v.front().grid;
  if (static_cast<int>(v.size()) != grid.dim()) throw DimensionError("divergence: component count != dim");
  const auto spec = spectrum(grid);
  std::vector<Complex> acc(spec->modes);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    require_same_grid(grid, v[axis].grid, "divergence");
    const auto hat = forward_transform(grid, v[axis].values);
    const auto& k = axis == 0 ? spec->kx : spec->ky;
    const auto& nyq = axis == 0 ? spec->nyquist_x : spec->nyquist_y;
    for (std::size_t i = 0; i < hat.size(); ++i) {
      if (!nyq[i]) acc[i] += Complex(0.0, k[i]) * hat[i];
    }
  }
  GridField out(grid, inverse_transform(grid, std::move(acc)));
  out.check_finite("divergence");
  return out;
}

GridField laplacian(const GridField& a) {
  const auto spec = spectrum(a.grid);
  std::vector<double> sym(spec->modes);
  for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = -spec->k2(i);
  auto out = apply_symbol(a, sym);
  out.check_finite("laplacian");
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> velocity_weights(const VelocityGrid& vgrid,
                                     const std::function<double(const std::array<double, 2>&)>& w) {
  std::vector<double> out(vgrid.size());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = w(vgrid.velocity(v));
  return out;
}

GridField velocity_quadrature(const PhaseField& g, std::span<const double> weight) {
  if (weight.size() != g.nodes()) throw DimensionError("velocity quadrature: weight size mismatch");
  GridField out(g.sgrid);
  const double dw = g.vgrid.weight();
  for (std::size_t c = 0; c < out.values.size(); ++c) {
    const auto col = g.cell(c);
    double s = 0.0;
    for (std::size_t v = 0; v < col.size(); ++v) s += weight[v] * col[v];
    out.values[c] = s * dw;
  }
  return out;
}

}  // namespace vch
