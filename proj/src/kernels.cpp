#include "vch/kernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "vch/errors.hpp"

namespace vch {

namespace {

// Offset of index i along one axis, and whether it is the ambiguous
// half-period point.
struct AxisOffset {
  double y;
  bool half;
};

AxisOffset axis_offset(const SpatialGrid& g, std::size_t i) {
  return {g.offset(i), i == g.n() / 2};
}

void normalize(GridField& f) {
  const double mass = f.integral();
  for (double& v : f.values) v /= mass;
}

}  // namespace

Moments spatial_moments(const GridField& kernel) {
  const SpatialGrid& g = kernel.grid;
  const double dv = g.cell_volume();
  Moments m;
  for (std::size_t c = 0; c < kernel.values.size(); ++c) {
    const auto idx = g.index(c);
    const double w = kernel.values[c] * dv;
    std::array<AxisOffset, 2> o{axis_offset(g, idx[0]), AxisOffset{0.0, false}};
    if (g.dim() == 2) o[1] = axis_offset(g, idx[1]);
    m.mass += w;
    for (int a = 0; a < g.dim(); ++a) {
      if (!o[a].half) m.mean[a] += w * o[a].y;
      for (int b = 0; b < g.dim(); ++b) {
        if (a != b && (o[a].half || o[b].half)) continue;
        m.second[a][b] += w * o[a].y * o[b].y;
      }
    }
  }
  return m;
}

ShortRangeKernel make_short_kernel(const SpatialGrid& grid, double sigma) {
  const double L = grid.period();
  if (!(sigma > 0.0)) throw ConfigError("short-range kernel: sigma_S must be positive");
  if (sigma > L / 12.0) {
    std::ostringstream os;
    os << "short-range kernel: sigma_S = " << sigma << " exceeds L/12 = " << L / 12.0
       << "; periodization would distort the moments";
    throw ConfigError(os.str());
  }
  ShortRangeKernel k;
  k.sigma = sigma;
  k.samples = GridField(grid);
  auto periodic_gauss = [&](double y) {
    double s = 0.0;
    for (int p = -3; p <= 3; ++p) {
      const double z = y + p * L;
      s += std::exp(-z * z / (2.0 * sigma * sigma));
    }
    return s;
  };
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto idx = grid.index(c);
    double v = periodic_gauss(grid.offset(idx[0]));
    if (grid.dim() == 2) v *= periodic_gauss(grid.offset(idx[1]));
    k.samples.values[c] = v;
  }
  normalize(k.samples);
  k.moments = spatial_moments(k.samples);
  k.symbol = kernel_symbol(k.samples);
  return k;
}

// ---------------------------------------------------------------------------

LongRangeKernel::LongRangeKernel(double support_radius, GridField samples)
    : support_radius_(support_radius), samples_(std::move(samples)) {
  moments_ = spatial_moments(samples_);
  delta_ = moments_.second[0][0];
  const SpatialGrid& g = samples_.grid;
  const double dv = g.cell_volume();
  for (std::size_t c = 0; c < samples_.values.size(); ++c) {
    if (samples_.values[c] == 0.0) continue;
    const auto idx = g.index(c);
    Atom a{{g.offset(idx[0]), g.dim() == 2 ? g.offset(idx[1]) : 0.0}, samples_.values[c] * dv};
    atoms_.push_back(a);
  }
}

double LongRangeKernel::max_alpha() const noexcept {
  return samples_.grid.period() / (8.0 * support_radius_);
}

void LongRangeKernel::check_scale(double alpha) const {
  if (!(alpha > 0.0)) throw ConfigError("long-range kernel: alpha must be positive");
  if (alpha * support_radius_ > samples_.grid.period() / 8.0 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "long-range kernel: scaled support alpha*R = " << alpha * support_radius_
       << " exceeds L/8 = " << samples_.grid.period() / 8.0;
    throw ConfigError(os.str());
  }
}

std::vector<double> LongRangeKernel::symbol(double alpha) const {
  check_scale(alpha);
  const auto spec = spectrum(samples_.grid);
  std::vector<double> sym(spec->modes, 0.0);
  for (std::size_t i = 0; i < spec->modes; ++i) {
    const double kx = alpha * spec->kx[i];
    const double ky = alpha * spec->ky[i];
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.weight * std::cos(kx * a.offset[0] + ky * a.offset[1]);
    sym[i] = s;
  }
  return sym;
}

LongRangeKernel make_long_kernel(const SpatialGrid& grid, double support_radius) {
  const double L = grid.period();
  if (!(support_radius > 0.0)) throw ConfigError("long-range kernel: support radius must be positive");
  if (support_radius > L / 8.0 * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "long-range kernel: support radius R = " << support_radius << " exceeds L/8 = " << L / 8.0;
    throw ConfigError(os.str());
  }
  if (support_radius < 2.0 * grid.spacing()) {
    throw ConfigError("long-range kernel: support radius must span at least two grid cells");
  }
  GridField s(grid);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto idx = grid.index(c);
    double r2 = grid.offset(idx[0]) * grid.offset(idx[0]);
    if (grid.dim() == 2) r2 += grid.offset(idx[1]) * grid.offset(idx[1]);
    const double u2 = r2 / (support_radius * support_radius);
    s.values[c] = u2 < 1.0 ? std::exp(-1.0 / (1.0 - u2)) : 0.0;
  }
  normalize(s);
  LongRangeKernel k(support_radius, std::move(s));
  if (!(k.delta() > 0.0)) throw ConfigError("long-range kernel: second moment is not positive");
  return k;
}

// ---------------------------------------------------------------------------

double maxwellian_tail_mass(double xi_max, double diffusion, int dim) {
  const double inside = std::erf(xi_max / std::sqrt(2.0 * diffusion));
  // 1 - inside^dim without cancellation for inside close to 1
  const double out1 = std::erfc(xi_max / std::sqrt(2.0 * diffusion));
  return dim == 1 ? out1 : out1 * (1.0 + inside);
}

Maxwellian make_maxwellian(const VelocityGrid& vgrid, double diffusion) {
  if (!(diffusion > 0.0) || !std::isfinite(diffusion)) throw ConfigError("maxwellian: D must be positive");
  const double tail = maxwellian_tail_mass(vgrid.xi_max(), diffusion, vgrid.dim());
  if (vgrid.xi_max() < 6.0 * std::sqrt(diffusion) * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "maxwellian: xi_max = " << vgrid.xi_max() << " is below 6 sqrt(D) = " << 6.0 * std::sqrt(diffusion)
       << "; tail mass outside the box is " << tail;
    throw ConfigError(os.str());
  }
  Maxwellian M;
  M.diffusion = diffusion;
  M.vgrid = vgrid;
  M.tail_mass = tail;
  M.samples.resize(vgrid.size());
  double sum = 0.0;
  for (std::size_t v = 0; v < vgrid.size(); ++v) {
    const auto xi = vgrid.velocity(v);
    M.samples[v] = std::exp(-(xi[0] * xi[0] + xi[1] * xi[1]) / (2.0 * diffusion));
    sum += M.samples[v];
  }
  M.normalization = 1.0 / (sum * vgrid.weight());
  for (double& s : M.samples) s *= M.normalization;

  const double dw = vgrid.weight();
  for (std::size_t v = 0; v < vgrid.size(); ++v) {
    const auto xi = vgrid.velocity(v);
    const double w = M.samples[v] * dw;
    M.moments.mass += w;
    for (int a = 0; a < vgrid.dim(); ++a) {
      M.moments.mean[a] += w * xi[a];
      for (int b = 0; b < vgrid.dim(); ++b) M.moments.second[a][b] += w * xi[a] * xi[b];
    }
  }
  return M;
}

}  // namespace vch
