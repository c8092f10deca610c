#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vch/domain.hpp"
#include "vch/kernels.hpp"

namespace vch {

struct MacroOptions {
  double dt = 1e-4;
  double cfl_limit = 0.9;
};

struct MacroState {
  GridField rho;
  double time = 0.0;
  MacroOptions config;
  std::size_t steps = 0;
};

struct MacroRecord {
  double time = 0.0;
  double mass = 0.0;
  double min_rho = 0.0;
  double free_energy_surrogate = 0.0;
};

/// IMEX scheme for rho_t - D Lap rho - div(rho grad Phi) = 0 with
/// Phi = -c Lap[wS * wS * rho].
class MacroSolver {
 public:
  MacroSolver(const ShortRangeKernel& ks, double diffusion, double coefficient);

  double diffusion() const noexcept { return diffusion_; }
  double coefficient() const noexcept { return coefficient_; }
  const SpatialGrid& grid() const noexcept { return grid_; }

  GridField potential(const GridField& rho) const;
  /// Explicit upwind convection, then implicit diffusion. Throws StepSizeError
  /// if dt * sum_axes max|grad Phi| / dx exceeds the CFL limit.
  MacroState step(MacroState s) const;
  double cfl_dt(const GridField& rho, double cfl_limit) const;
  /// int D rho log rho + (c/2) |grad(wS * rho)|^2.
  double surrogate(const GridField& rho) const;
  MacroRecord record(const MacroState& s) const;

 private:
  SpatialGrid grid_;
  double diffusion_;
  double coefficient_;
  std::vector<double> ws_;         // wS symbol
  std::vector<double> phi_symbol_;  // c k^2 wS^2
  std::vector<double> k2_fd_;      // finite-difference Laplacian eigenvalues
};

struct MacroRun {
  MacroState final;
  std::vector<MacroRecord> records;  // one per step, plus t = 0
  std::vector<GridField> checkpoints;
};

/// Advances to time T in ceil(T / dt) equal steps; the step count is rounded
/// up to a multiple of (checkpoints - 1) so that checkpoint times fall on steps.
MacroRun run_macro(const MacroSolver& solver, const GridField& rho0, double T, MacroOptions options,
                   std::size_t checkpoints = 2);

}  // namespace vch
