#include "vch/diagnostics.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "vch/errors.hpp"

namespace vch {

namespace {

double sqr(double x) { return x * x; }

double speed(const std::array<double, 2>& xi) { return std::hypot(xi[0], xi[1]); }

// (a - b)(log a - log b) for a, b > 0, accurate when a ~ b.
double log_gap(double a, double b) {
  const double d = a - b;
  return d * std::log1p(d / b);
}

}  // namespace

InteractionEnergy interaction_energy(const GridField& rho, const PotentialOperator& op) {
  if (!(rho.grid == op.grid())) throw DimensionError("interaction energy: density on a different grid");
  const auto spec = spectrum(rho.grid);
  const auto hat = forward_transform(rho.grid, rho.values);
  const auto& sym = op.total_symbol();
  const double scale = rho.grid.cell_volume() / static_cast<double>(rho.grid.size());
  InteractionEnergy e;
  double negative = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double c = spec->multiplicity[i] * sym[i] * std::norm(hat[i]) * scale;
    e.value += c;
    if (c < 0.0) negative += c;
  }
  e.negative_part = -negative;
  return e;
}

InteractionEnergy interaction_energy(const GridField& rho, const ShortRangeKernel& ks, const LongRangeKernel& kl,
                                     double alpha) {
  return interaction_energy(rho, PotentialOperator(ks, kl, alpha));
}

double interaction_energy_direct(const GridField& rho, const ShortRangeKernel& ks, const LongRangeKernel& kl,
                                 double alpha) {
  if (!(rho.grid == ks.samples.grid)) throw DimensionError("interaction energy: density and kernel grids differ");
  kl.check_scale(alpha);
  const SpatialGrid& sg = rho.grid;
  const auto g = apply_symbol(rho, ks.symbol);
  const double h = sg.spacing();
  const auto n = static_cast<long>(sg.n());
  auto wrap = [n](long i) { return static_cast<std::size_t>(((i % n) + n) % n); };
  double total = 0.0;
  for (const auto& atom : kl.atoms()) {
    std::array<long, 2> s{};
    for (int a = 0; a < sg.dim(); ++a) {
      const double q = alpha * atom.offset[a] / h;
      s[a] = std::lround(q);
      if (std::abs(q - static_cast<double>(s[a])) > 1e-9) {
        std::ostringstream os;
        os << "interaction energy: scaled atom offset " << alpha * atom.offset[a] << " is not on the grid";
        throw ParameterError(os.str());
      }
    }
    double acc = 0.0;
    for (std::size_t c = 0; c < sg.size(); ++c) {
      const auto idx = sg.index(c);
      const std::size_t i = wrap(static_cast<long>(idx[0]) - s[0]);
      const std::size_t j = sg.dim() == 2 ? wrap(static_cast<long>(idx[1]) - s[1]) : 0;
      acc += sqr(g.values[c] - g.values[sg.flat(i, j)]);
    }
    total += atom.weight * acc;
  }
  return total * sg.cell_volume() / (2.0 * alpha * alpha);
}

DissipationField dissipation_field(const PhaseField& f, const Maxwellian& M, double eps) {
  DissipationField out;
  out.field = PhaseField(f.sgrid, f.vgrid);
  out.cell_norm = GridField(f.sgrid);
  out.cell_degenerate.assign(f.sgrid.size(), false);
  const double inv = 1.0 / (eps * eps);
  const double dw = f.vgrid.weight();
  const auto rho = compute_rho(f);
  for (std::size_t c = 0; c < f.sgrid.size(); ++c) {
    const auto col = f.cell(c);
    auto dst = out.field.cell(c);
    double s = 0.0;
    for (std::size_t v = 0; v < col.size(); ++v) {
      const double a = col[v];
      const double b = rho.values[c] * M.samples[v];
      double d = 0.0;
      if (a > 0.0 && b > 0.0) {
        d = inv * log_gap(a, b);
        s += d;
      } else if (a != b) {
        d = std::numeric_limits<double>::infinity();
        ++out.degenerate;
        out.cell_degenerate[c] = true;
      }
      dst[v] = d;
    }
    out.cell_norm.values[c] = s * dw;
  }
  out.norm = out.cell_norm.integral();
  return out;
}

double total_mass(const PhaseField& f) { return f.integral(); }

double kinetic_energy(const PhaseField& f) {
  const auto w = velocity_weights(f.vgrid, [](const auto& xi) { return xi[0] * xi[0] + xi[1] * xi[1]; });
  return velocity_quadrature(f, w).integral();
}

double entropy(const PhaseField& f, std::size_t* zero_entries) {
  double s = 0.0;
  std::size_t zeros = 0;
  for (double v : f.values) {
    if (v > 0.0) {
      s += v * std::log(v);
    } else {
      ++zeros;
    }
  }
  if (zero_entries) *zero_entries = zeros;
  return s * f.sgrid.cell_volume() * f.vgrid.weight();
}

double energy_rhs(const PhaseField& f, const Maxwellian& M, double eps) {
  const auto rho = compute_rho(f);
  double s = 0.0;
  for (std::size_t c = 0; c < f.sgrid.size(); ++c) {
    const auto col = f.cell(c);
    for (std::size_t v = 0; v < col.size(); ++v) {
      const auto xi = f.vgrid.velocity(v);
      s += (xi[0] * xi[0] + xi[1] * xi[1]) * (rho.values[c] * M.samples[v] - col[v]);
    }
  }
  return s * f.sgrid.cell_volume() * f.vgrid.weight() / (eps * eps);
}

double entropy_rhs(const PhaseField& f, const Maxwellian& M, double eps, std::size_t* skipped) {
  const auto rho = compute_rho(f);
  double s = 0.0;
  std::size_t skip = 0;
  for (std::size_t c = 0; c < f.sgrid.size(); ++c) {
    const auto col = f.cell(c);
    for (std::size_t v = 0; v < col.size(); ++v) {
      if (!(col[v] > 0.0)) {
        ++skip;
        continue;
      }
      s += (rho.values[c] * M.samples[v] - col[v]) * std::log(col[v]);
    }
  }
  if (skipped) *skipped = skip;
  return s * f.sgrid.cell_volume() * f.vgrid.weight() / (eps * eps);
}

double flux_bound_constant(const Maxwellian& M, double r) {
  if (!(r > 0.0) || r > 1.0) throw ParameterError("flux bound: r must lie in (0, 1]");
  double s = 0.0;
  for (std::size_t v = 0; v < M.vgrid.size(); ++v) {
    const double a = speed(M.vgrid.velocity(v));
    s += r * a * M.samples[v] * std::expm1(a / r);
  }
  return std::sqrt(s * M.vgrid.weight());
}

FluxBoundVerdict check_flux_bounds(const PhaseField& f, const Maxwellian& M, double eps, double r) {
  FluxBoundVerdict out;
  out.r = r;
  out.constant = flux_bound_constant(M, r);
  const auto flux = compute_flux(f, M, eps, r);
  const auto dis = dissipation_field(f, M, eps);
  const auto rho = compute_rho(f);
  const int d = f.sgrid.dim();
  const double dw = f.vgrid.weight();
  out.cells = f.sgrid.size();
  for (std::size_t c = 0; c < out.cells; ++c) {
    if (dis.cell_degenerate[c]) {
      // the dissipation is infinite in this cell
      ++out.bound_ok;
      ++out.j1_ok;
      ++out.j2_ok;
      continue;
    }
    double slack = 0.0;
    const auto col = f.cell(c);
    for (std::size_t v = 0; v < col.size(); ++v) {
      slack += speed(f.vgrid.velocity(v)) * (col[v] + rho.values[c] * M.samples[v]);
    }
    slack *= 64.0 * DBL_EPSILON * dw / eps;
    auto norm = [&](const VectorField& J) {
      double s = 0.0;
      for (int a = 0; a < d; ++a) s += sqr(J[a].values[c]);
      return std::sqrt(s);
    };
    const double Dn = dis.cell_norm.values[c];
    const double second = out.constant * std::sqrt(std::max(rho.values[c], 0.0) * Dn);
    const double bound = r * eps * Dn + second + slack;
    const double J = norm(flux.J);
    if (J <= bound) ++out.bound_ok;
    if (norm(flux.J1) <= eps * Dn + slack) ++out.j1_ok;
    if (norm(flux.J2) <= second + slack) ++out.j2_ok;
    if (bound > 0.0) out.worst_bound_ratio = std::max(out.worst_bound_ratio, J / bound);
  }
  return out;
}

CsiszarKullback csiszar_kullback_check(std::span<const double> f, std::span<const double> g, double weight) {
  if (f.size() != g.size()) throw DimensionError("Csiszar-Kullback: arrays differ in size");
  double mf = 0.0, mg = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 0.0 || g[i] < 0.0) throw ParameterError("Csiszar-Kullback: arrays must be nonnegative");
    mf += f[i];
    mg += g[i];
  }
  mf *= weight;
  mg *= weight;
  if (std::abs(mf - mg) > 1e-12 * std::max(mf, mg)) {
    std::ostringstream os;
    os << "Csiszar-Kullback: masses differ (" << mf << " vs " << mg << ")";
    throw ParameterError(os.str());
  }
  CsiszarKullback out;
  double l1 = 0.0, kl = 0.0;
  bool infinite = false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    l1 += std::abs(f[i] - g[i]);
    if (f[i] > 0.0 && g[i] > 0.0) {
      kl += log_gap(f[i], g[i]);
    } else if (f[i] != g[i]) {
      infinite = true;
    }
  }
  l1 *= weight;
  out.lhs = l1 * l1;
  out.rhs = infinite ? std::numeric_limits<double>::infinity() : mf * kl * weight;
  out.holds = out.lhs <= out.rhs + 16.0 * DBL_EPSILON * mf * l1;
  return out;
}

double xi_tensor_residual(const PhaseField& f, const Maxwellian& M) {
  const auto rho = compute_rho(f);
  const int d = f.vgrid.dim();
  const double dw = f.vgrid.weight();
  double total = 0.0;
  for (std::size_t c = 0; c < f.sgrid.size(); ++c) {
    const auto col = f.cell(c);
    std::array<std::array<double, 2>, 2> t{};
    for (std::size_t v = 0; v < col.size(); ++v) {
      const auto xi = f.vgrid.velocity(v);
      const double diff = col[v] - rho.values[c] * M.samples[v];
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) t[a][b] += xi[a] * xi[b] * diff;
    }
    double fro = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) fro += sqr(t[a][b] * dw);
    total += std::sqrt(fro);
  }
  return total * f.sgrid.cell_volume();
}

namespace {

template <typename Fn>
double flux_integral(const FluxField& J, Fn weight) {
  if (J.J.empty()) return 0.0;
  const SpatialGrid& g = J.J[0].grid;
  double s = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    double m = 0.0;
    for (const auto& comp : J.J) m += sqr(comp.values[c]);
    s += weight(std::sqrt(m));
  }
  return s * g.cell_volume();
}

}  // namespace

double flux_l1(const FluxField& J) {
  return flux_integral(J, [](double a) { return a; });
}

double flux_loglog_norm(const FluxField& J) {
  return flux_integral(J, [](double a) {
    const double m = std::max(a, std::numbers::e);
    return a * std::sqrt(std::max(std::log(std::log(m)), 0.0));
  });
}

std::span<const double> default_radii() {
  static const double radii[] = {0.25, 0.5, 1.0};
  return radii;
}

DiagnosticsRecord evaluate(const KineticState& s, const KineticStepper& stepper, std::span<const double> radii) {
  const PhaseField& f = s.f;
  const Maxwellian& M = stepper.maxwellian();
  const double eps = s.eps;
  DiagnosticsRecord r;
  r.time = s.time;
  r.mass = total_mass(f);
  r.kinetic_energy = kinetic_energy(f);
  const auto rho = compute_rho(f);
  const auto ie = interaction_energy(rho, stepper.potentials());
  r.interaction_energy = ie.value;
  r.interaction_negative = ie.negative_part;
  r.total_energy = r.kinetic_energy + r.interaction_energy;
  r.entropy = entropy(f, &r.zero_entries);
  r.free_energy = 2.0 * M.diffusion * r.entropy + r.total_energy;
  const auto dis = dissipation_field(f, M, eps);
  r.dissipation_norm = dis.norm;
  r.degenerate_nodes = dis.degenerate;
  const auto flux = compute_flux(f, M, eps, 1.0);
  r.flux_l1 = flux_l1(flux);
  r.flux_loglog = flux_loglog_norm(flux);
  r.xi_residual = xi_tensor_residual(f, M);
  r.energy_rhs = energy_rhs(f, M, eps);
  r.entropy_rhs = entropy_rhs(f, M, eps);
  for (double radius : radii) {
    const auto v = check_flux_bounds(f, M, eps, radius);
    r.flux_bound_ok = r.flux_bound_ok && v.bound_holds();
    r.flux_split_ok = r.flux_split_ok && v.split_holds();
  }
  std::vector<double> eq(f.nodes());
  for (std::size_t c = 0; c < f.sgrid.size(); ++c) {
    if (!(rho.values[c] > 0.0)) continue;
    for (std::size_t v = 0; v < eq.size(); ++v) eq[v] = rho.values[c] * M.samples[v];
    if (!csiszar_kullback_check(f.cell(c), eq, f.vgrid.weight()).holds) {
      r.ck_ok = false;
      break;
    }
  }
  return r;
}

namespace {

using Getter = std::function<double(const DiagnosticsRecord&)>;

IdentityCheck residual_series(std::span<const DiagnosticsRecord> recs, const Getter& q, const Getter& rhs) {
  if (recs.size() < 3) throw ParameterError("identity check: need at least three records");
  IdentityCheck out;
  out.dt = recs[1].time - recs[0].time;
  if (!(out.dt > 0.0)) throw ParameterError("identity check: record times must increase");
  for (std::size_t n = 0; n + 1 < recs.size(); ++n) {
    const double dt = recs[n + 1].time - recs[n].time;
    if (std::abs(dt - out.dt) > 1e-9 * out.dt) throw ParameterError("identity check: records are not uniformly spaced");
    const double res = (q(recs[n + 1]) - q(recs[n])) / dt - 0.5 * (rhs(recs[n]) + rhs(recs[n + 1]));
    out.residuals.push_back(res);
    out.max_abs = std::max(out.max_abs, std::abs(res));
  }
  return out;
}

}  // namespace

IdentityCheck check_energy_identity(std::span<const DiagnosticsRecord> records) {
  return residual_series(
      records, [](const auto& r) { return r.total_energy; }, [](const auto& r) { return r.energy_rhs; });
}

IdentityCheck check_entropy_identity(std::span<const DiagnosticsRecord> records) {
  return residual_series(
      records, [](const auto& r) { return r.entropy; }, [](const auto& r) { return r.entropy_rhs; });
}

FreeEnergyCheck check_free_energy_identity(std::span<const DiagnosticsRecord> records, double diffusion,
                                           double tolerance) {
  FreeEnergyCheck out;
  static_cast<IdentityCheck&>(out) = residual_series(
      records, [](const auto& r) { return r.free_energy; },
      [diffusion](const auto& r) { return -2.0 * diffusion * r.dissipation_norm; });
  out.tolerance = tolerance >= 0.0 ? tolerance : out.max_abs / out.dt;
  const double allowed = out.tolerance * out.dt * out.dt;
  for (std::size_t n = 0; n + 1 < records.size(); ++n) {
    if (records[n + 1].free_energy - records[n].free_energy > allowed) ++out.monotonicity_violations;
  }
  return out;
}

void fill_residuals(std::span<DiagnosticsRecord> records, double diffusion) {
  for (std::size_t n = 0; n + 1 < records.size(); ++n) {
    auto& a = records[n];
    auto& b = records[n + 1];
    const double dt = b.time - a.time;
    if (!(dt > 0.0)) continue;
    b.res_energy = (b.total_energy - a.total_energy) / dt - 0.5 * (a.energy_rhs + b.energy_rhs);
    b.res_entropy = (b.entropy - a.entropy) / dt - 0.5 * (a.entropy_rhs + b.entropy_rhs);
    b.res_free = (b.free_energy - a.free_energy) / dt + diffusion * (a.dissipation_norm + b.dissipation_norm);
  }
}

}  // namespace vch
