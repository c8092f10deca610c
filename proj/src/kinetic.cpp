#include "vch/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vch/diagnostics.hpp"
#include "vch/errors.hpp"

namespace vch {

namespace {

// Logarithmic mean (x - y) / (log x - log y), continuous at x == y and zero
// when either argument vanishes.
double log_mean(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) return 0.0;
  const double s = x + y;
  const double u = (x - y) / s;
  const double u2 = u * u;
  if (u2 < 1e-4) {
    // u / atanh(u) = 1 / (1 + u^2/3 + u^4/5 + u^6/7 + ...)
    return 0.5 * s / (1.0 + u2 * (1.0 / 3.0 + u2 * (1.0 / 5.0 + u2 * (1.0 / 7.0))));
  }
  return (x - y) / std::log(x / y);
}

// Lagrange weights for the value at local coordinate t in (0, 1] between
// nodes 0 and 1 of the stencil {-1, 0, 1, 2}.
std::array<double, 4> cubic_weights(double t) {
  return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
          -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

// Shifts a periodic line of samples by `shift` cells (value at j becomes the
// old value at j - shift) with monotone clipped cubic interpolation.
void shift_line(std::span<double> line, double shift, std::vector<double>& scratch) {
  const auto n = static_cast<long>(line.size());
  scratch.assign(line.begin(), line.end());
  const double q = std::floor(shift);
  const double theta = shift - q;
  const double t = 1.0 - theta;
  const auto w = cubic_weights(t);
  const long qi = static_cast<long>(q);
  auto at = [&](long i) { return scratch[static_cast<std::size_t>(((i % n) + n) % n)]; };
  for (long j = 0; j < n; ++j) {
    const long i0 = j - qi - 1;
    const double a = at(i0), b = at(i0 + 1);
    double v = w[0] * at(i0 - 1) + w[1] * a + w[2] * b + w[3] * at(i0 + 2);
    v = std::clamp(v, std::min(a, b), std::max(a, b));
    line[static_cast<std::size_t>(j)] = v;
  }
}

}  // namespace

PhaseField well_prepared(const GridField& rho0, const Maxwellian& M) {
  PhaseField f(rho0.grid, M.vgrid);
  for (std::size_t c = 0; c < rho0.values.size(); ++c) {
    auto col = f.cell(c);
    for (std::size_t v = 0; v < col.size(); ++v) col[v] = rho0.values[c] * M.samples[v];
  }
  return f;
}

GridField compute_rho(const PhaseField& f) {
  GridField rho(f.sgrid);
  const double dw = f.vgrid.weight();
  for (std::size_t c = 0; c < rho.values.size(); ++c) {
    double s = 0.0;
    for (double v : f.cell(c)) s += v;
    rho.values[c] = s * dw;
  }
  return rho;
}

FluxField compute_flux(const PhaseField& f, const Maxwellian& M, double eps, double r) {
  if (!(r > 0.0) || r > 1.0) throw ParameterError("compute_flux: r must lie in (0, 1]");
  if (!(f.vgrid == M.vgrid)) throw DimensionError("compute_flux: Maxwellian on a different velocity grid");
  const int d = f.sgrid.dim();
  FluxField out;
  out.r = r;
  for (int a = 0; a < d; ++a) {
    out.J.emplace_back(f.sgrid);
    out.J1.emplace_back(f.sgrid);
    out.J2.emplace_back(f.sgrid);
  }
  const auto rho = compute_rho(f);
  const double dw = f.vgrid.weight();
  for (std::size_t c = 0; c < rho.values.size(); ++c) {
    const double rc = rho.values[c];
    if (!(rc > 0.0)) continue;
    const auto col = f.cell(c);
    std::array<double, 2> j1{}, j2{};
    for (std::size_t v = 0; v < col.size(); ++v) {
      const auto xi = f.vgrid.velocity(v);
      const double eq = rc * M.samples[v];
      const double diff = col[v] - eq;
      const double speed = std::hypot(xi[0], xi[1]);
      const bool first = col[v] <= 0.0 || std::abs(std::log(col[v] / eq)) >= speed / r;
      auto& acc = first ? j1 : j2;
      for (int a = 0; a < d; ++a) acc[a] += xi[a] * diff;
    }
    for (int a = 0; a < d; ++a) {
      out.J1[a].values[c] = j1[a] * dw / eps;
      out.J2[a].values[c] = j2[a] * dw / eps;
      out.J[a].values[c] = out.J1[a].values[c] + out.J2[a].values[c];
    }
  }
  return out;
}

InitialDataReport validate_initial(const PhaseField& f0, const ShortRangeKernel& ks, const LongRangeKernel& kl,
                                   std::span<const double> alphas) {
  InitialDataReport rep;
  const double dv = f0.sgrid.cell_volume() * f0.vgrid.weight();
  for (std::size_t c = 0; c < f0.sgrid.size(); ++c) {
    const auto col = f0.cell(c);
    for (std::size_t v = 0; v < col.size(); ++v) {
      const double x = col[v];
      if (!std::isfinite(x)) throw ValidationError("initial data: non-finite entry");
      if (x < 0.0) {
        std::ostringstream os;
        os << "initial data: negative entry " << x << " at cell " << c << ", node " << v;
        throw ValidationError(os.str());
      }
      const auto xi = f0.vgrid.velocity(v);
      if (x == 0.0) {
        ++rep.zero_entries;
        continue;
      }
      const double lg = std::log(x);
      rep.moment_functional += (1.0 + xi[0] * xi[0] + xi[1] * xi[1] + std::abs(lg)) * x * dv;
      rep.entropy += x * lg * dv;
    }
  }
  rep.entropy_finite = std::isfinite(rep.entropy) && std::isfinite(rep.moment_functional);
  const auto rho = compute_rho(f0);
  for (double a : alphas) {
    const double value = 2.0 * interaction_energy(rho, ks, kl, a).value;
    rep.interaction.emplace_back(a, value);
    rep.interaction_sup = std::max(rep.interaction_sup, value);
  }
  return rep;
}

// ---------------------------------------------------------------------------

KineticStepper::KineticStepper(Maxwellian M, const ShortRangeKernel& ks, const LongRangeKernel& kl, double alpha)
    : M_(std::move(M)), potential_(ks, kl, alpha) {
  if (M_.vgrid.dim() != ks.samples.grid.dim()) throw DimensionError("kinetic: velocity and spatial dims differ");
  const VelocityGrid& vg = M_.vgrid;
  const std::size_t m = vg.m();
  const double D = M_.diffusion;
  const double dxi = vg.spacing();
  maxwellian_1d_.resize(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    maxwellian_1d_[i] = std::exp(-vg.node(i) * vg.node(i) / (2.0 * D));
    sum += maxwellian_1d_[i];
  }
  for (double& x : maxwellian_1d_) x /= sum * dxi;
  // Discrete M at faces: W_{i+1/2} - W_{i-1/2} = -(dxi / D) xi_i M_i, W_{-1/2} = 0.
  face_weight_1d_.resize(m - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    acc -= dxi / D * vg.node(i) * maxwellian_1d_[i];
    face_weight_1d_[i] = acc;
  }
}

double KineticStepper::cfl_dt(const PhaseField& f, double eps, double cfl_limit) const {
  const auto force = potential_.force(compute_rho(f));
  double speed = 0.0;
  for (const auto& c : force) speed += c.max_abs();
  if (speed == 0.0) return std::numeric_limits<double>::infinity();
  return cfl_limit * eps * f.vgrid.spacing() / speed;
}

void KineticStepper::transport_x(PhaseField& f, double tau, double eps, XTransport kind) const {
  const SpatialGrid& sg = f.sgrid;
  const std::size_t nv = f.nodes();
  const std::size_t N = sg.size();
  std::vector<double> col(N);
  if (kind == XTransport::spectral) {
    const auto spec = spectrum(sg);
    auto axis_factor = [](double k, double s, bool nyquist) {
      return nyquist ? Complex(std::cos(k * s), 0.0) : std::polar(1.0, -k * s);
    };
    for (std::size_t v = 0; v < nv; ++v) {
      const auto xi = f.vgrid.velocity(v);
      const double sx = xi[0] * tau / eps;
      const double sy = xi[1] * tau / eps;
      for (std::size_t c = 0; c < N; ++c) col[c] = f.values[c * nv + v];
      auto hat = forward_transform(sg, col);
      for (std::size_t i = 0; i < hat.size(); ++i) {
        hat[i] *= axis_factor(spec->kx[i], sx, spec->nyquist_x[i]) * axis_factor(spec->ky[i], sy, spec->nyquist_y[i]);
      }
      col = inverse_transform(sg, std::move(hat));
      for (std::size_t c = 0; c < N; ++c) f.values[c * nv + v] = col[c];
    }
    return;
  }
  const std::size_t n = sg.n();
  const double h = sg.spacing();
  std::vector<double> line(n), scratch;
  for (std::size_t v = 0; v < nv; ++v) {
    const auto xi = f.vgrid.velocity(v);
    for (int axis = 0; axis < sg.dim(); ++axis) {
      const double shift = xi[axis] * tau / eps / h;
      const std::size_t lines = sg.dim() == 1 ? 1 : n;
      for (std::size_t l = 0; l < lines; ++l) {
        auto cell_of = [&](std::size_t j) {
          if (sg.dim() == 1) return j;
          return axis == 0 ? sg.flat(j, l) : sg.flat(l, j);
        };
        for (std::size_t j = 0; j < n; ++j) line[j] = f.values[cell_of(j) * nv + v];
        shift_line(line, shift, scratch);
        for (std::size_t j = 0; j < n; ++j) f.values[cell_of(j) * nv + v] = line[j];
      }
    }
  }
}

void KineticStepper::transport_xi(PhaseField& f, const VectorField& force, double tau, double eps,
                                  XiFlux kind) const {
  const VelocityGrid& vg = f.vgrid;
  const std::size_t m = vg.m();
  const int d = vg.dim();
  const double lambda = tau / vg.spacing();
  std::vector<double> old(f.nodes()), g(f.nodes());
  for (std::size_t c = 0; c < f.sgrid.size(); ++c) {
    auto col = f.cell(c);
    std::copy(col.begin(), col.end(), old.begin());
    if (kind == XiFlux::logmean) {
      for (std::size_t v = 0; v < old.size(); ++v) g[v] = old[v] / M_.samples[v];
    }
    for (int axis = 0; axis < d; ++axis) {
      const double a = force[axis].values[c] / eps;
      if (a == 0.0) continue;
      const std::size_t lines = d == 1 ? 1 : m;
      for (std::size_t l = 0; l < lines; ++l) {
        // flat index of node i along this axis on line l
        auto node = [&](std::size_t i) {
          if (d == 1) return i;
          return axis == 0 ? i * m + l : l * m + i;
        };
        const double across = d == 1 ? 1.0 : maxwellian_1d_[l];
        for (std::size_t i = 0; i + 1 < m; ++i) {
          const std::size_t lo = node(i), hi = node(i + 1);
          double flux;
          if (kind == XiFlux::upwind) {
            flux = a > 0.0 ? a * old[lo] : a * old[hi];
          } else {
            flux = a * face_weight_1d_[i] * across * log_mean(g[lo], g[hi]);
          }
          col[lo] -= lambda * flux;
          col[hi] += lambda * flux;
        }
      }
    }
  }
}

void KineticStepper::relax(PhaseField& f, double dt, double eps) const {
  const double decay = std::exp(-dt / (eps * eps));
  const double dw = f.vgrid.weight();
  for (std::size_t c = 0; c < f.sgrid.size(); ++c) {
    auto col = f.cell(c);
    double rho = 0.0;
    for (double v : col) rho += v;
    rho *= dw;
    for (std::size_t v = 0; v < col.size(); ++v) {
      const double eq = rho * M_.samples[v];
      col[v] = eq + (col[v] - eq) * decay;
    }
  }
}

KineticState KineticStepper::step(KineticState s) const {
  const KineticOptions& o = s.config;
  if (!(o.dt > 0.0) || !std::isfinite(o.dt)) throw ParameterError("kinetic step: dt must be positive");
  if (!(s.eps > 0.0)) throw ParameterError("kinetic step: eps must be positive");
  if (!(s.f.vgrid == M_.vgrid) || !(s.f.sgrid == potential_.grid())) {
    throw DimensionError("kinetic step: state grids do not match the stepper");
  }
  if (s.alpha != potential_.alpha()) throw ParameterError("kinetic step: state alpha differs from the stepper's");

  const double tau = 0.5 * o.dt;
  auto check_cfl = [&](const VectorField& force) {
    double speed = 0.0;
    for (const auto& c : force) speed += c.max_abs();
    const double courant = o.dt * speed / (s.eps * s.f.vgrid.spacing());
    if (courant > o.cfl_limit) {
      const double suggested = o.cfl_limit * s.eps * s.f.vgrid.spacing() / speed;
      std::ostringstream os;
      os << "kinetic step: CFL number " << courant << " exceeds " << o.cfl_limit << "; use dt <= " << suggested;
      throw StepSizeError(os.str(), suggested);
    }
  };
  if (o.xi_transport_enabled) check_cfl(potential_.force(compute_rho(s.f)));
  if (o.x_transport_enabled) transport_x(s.f, tau, s.eps, o.x_transport);

  VectorField force;
  if (o.xi_transport_enabled) {
    // the transported density sets the force actually used
    force = potential_.force(compute_rho(s.f));
    check_cfl(force);
    transport_xi(s.f, force, tau, s.eps, o.xi_flux);
  }
  if (o.relaxation_enabled) relax(s.f, o.dt, s.eps);
  if (o.xi_transport_enabled) transport_xi(s.f, force, tau, s.eps, o.xi_flux);
  if (o.x_transport_enabled) transport_x(s.f, tau, s.eps, o.x_transport);

  const double dv = s.f.sgrid.cell_volume() * s.f.vgrid.weight();
  for (double& v : s.f.values) {
    if (!std::isfinite(v)) throw ValidationError("kinetic step: non-finite value in f");
    if (v < 0.0) {
      ++s.audit.clipped_entries;
      if (v < o.clip_threshold) ++s.audit.violations;
      s.audit.clipped_mass -= v * dv;
      v = 0.0;
    }
  }
  s.time += o.dt;
  ++s.steps;
  return s;
}

}  // namespace vch
