#include "vch/macro.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vch/errors.hpp"

namespace vch {

MacroSolver::MacroSolver(const ShortRangeKernel& ks, double diffusion, double coefficient)
    : grid_(ks.samples.grid), diffusion_(diffusion), coefficient_(coefficient), ws_(ks.symbol) {
  if (!(diffusion > 0.0)) throw ConfigError("macro: D must be positive");
  if (!(coefficient >= 0.0)) throw ConfigError("macro: limit coefficient must be nonnegative");
  const auto spec = spectrum(grid_);
  const double h = grid_.spacing();
  phi_symbol_.resize(spec->modes);
  k2_fd_.resize(spec->modes);
  for (std::size_t i = 0; i < spec->modes; ++i) {
    phi_symbol_[i] = coefficient_ * spec->k2(i) * ws_[i] * ws_[i];
    const double sx = std::sin(0.5 * spec->kx[i] * h);
    const double sy = std::sin(0.5 * spec->ky[i] * h);
    k2_fd_[i] = 4.0 / (h * h) * (sx * sx + sy * sy);
  }
}

GridField MacroSolver::potential(const GridField& rho) const {
  if (!(rho.grid == grid_)) throw DimensionError("macro: density on a different grid");
  return apply_symbol(rho, phi_symbol_);
}

namespace {

// Face velocities u = -(phi_{i+1} - phi_i)/h along one axis, stored at the
// lower cell of each face.
GridField face_velocity(const GridField& phi, int axis) {
  const SpatialGrid& g = phi.grid;
  const std::size_t n = g.n();
  const double h = g.spacing();
  GridField u(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto idx = g.index(c);
    const std::size_t up = axis == 0 ? g.flat((idx[0] + 1) % n, idx[1]) : g.flat(idx[0], (idx[1] + 1) % n);
    u.values[c] = -(phi.values[up] - phi.values[c]) / h;
  }
  return u;
}

}  // namespace

double MacroSolver::cfl_dt(const GridField& rho, double cfl_limit) const {
  const auto phi = potential(rho);
  double speed = 0.0;
  for (int a = 0; a < grid_.dim(); ++a) speed += face_velocity(phi, a).max_abs();
  if (speed == 0.0) return std::numeric_limits<double>::infinity();
  return cfl_limit * grid_.spacing() / speed;
}

MacroState MacroSolver::step(MacroState s) const {
  const double dt = s.config.dt;
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("macro step: dt must be positive");
  if (!(s.rho.grid == grid_)) throw DimensionError("macro step: density on a different grid");
  const std::size_t n = grid_.n();
  const double h = grid_.spacing();
  const auto phi = potential(s.rho);

  std::vector<GridField> u;
  double speed = 0.0;
  for (int a = 0; a < grid_.dim(); ++a) {
    u.push_back(face_velocity(phi, a));
    speed += u.back().max_abs();
  }
  const double courant = dt * speed / h;
  if (courant > s.config.cfl_limit) {
    const double suggested = s.config.cfl_limit * h / speed;
    std::ostringstream os;
    os << "macro step: convective CFL number " << courant << " exceeds " << s.config.cfl_limit
       << "; use dt <= " << suggested;
    throw StepSizeError(os.str(), suggested);
  }

  GridField next = s.rho;
  for (int a = 0; a < grid_.dim(); ++a) {
    for (std::size_t c = 0; c < grid_.size(); ++c) {
      const auto idx = grid_.index(c);
      const std::size_t up = a == 0 ? grid_.flat((idx[0] + 1) % n, idx[1]) : grid_.flat(idx[0], (idx[1] + 1) % n);
      const double v = u[a].values[c];
      const double flux = v * (v > 0.0 ? s.rho.values[c] : s.rho.values[up]);
      next.values[c] -= dt / h * flux;
      next.values[up] += dt / h * flux;
    }
  }

  auto hat = forward_transform(grid_, next.values);
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] /= 1.0 + dt * diffusion_ * k2_fd_[i];
  next.values = inverse_transform(grid_, std::move(hat));
  next.check_finite("macro step");

  s.rho = std::move(next);
  s.time += dt;
  ++s.steps;
  return s;
}

double MacroSolver::surrogate(const GridField& rho) const {
  double ent = 0.0;
  for (double r : rho.values) {
    if (r > 0.0) ent += r * std::log(r);
  }
  ent *= diffusion_ * grid_.cell_volume();
  const auto grad = gradient(apply_symbol(rho, ws_));
  double g2 = 0.0;
  for (const auto& comp : grad) {
    for (double v : comp.values) g2 += v * v;
  }
  return ent + 0.5 * coefficient_ * g2 * grid_.cell_volume();
}

MacroRecord MacroSolver::record(const MacroState& s) const {
  return {s.time, s.rho.integral(), s.rho.min(), surrogate(s.rho)};
}

MacroRun run_macro(const MacroSolver& solver, const GridField& rho0, double T, MacroOptions options,
                   std::size_t checkpoints) {
  if (!(T > 0.0)) throw ParameterError("run_macro: T must be positive");
  if (checkpoints < 2) throw ParameterError("run_macro: need at least two checkpoints");
  const std::size_t intervals = checkpoints - 1;
  std::size_t steps = static_cast<std::size_t>(std::ceil(T / options.dt - 1e-9));
  steps = std::max<std::size_t>(1, (steps + intervals - 1) / intervals) * intervals;
  options.dt = T / static_cast<double>(steps);
  const std::size_t stride = steps / intervals;

  MacroRun run;
  MacroState s{rho0, 0.0, options, 0};
  run.records.push_back(solver.record(s));
  run.checkpoints.push_back(s.rho);
  for (std::size_t k = 1; k <= steps; ++k) {
    s = solver.step(std::move(s));
    if (k == steps) s.time = T;
    run.records.push_back(solver.record(s));
    if (k % stride == 0) run.checkpoints.push_back(s.rho);
  }
  run.final = std::move(s);
  return run;
}

}  // namespace vch
