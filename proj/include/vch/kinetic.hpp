#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "vch/domain.hpp"
#include "vch/kernels.hpp"
#include "vch/potentials.hpp"

namespace vch {

enum class XTransport {
  spectral,         // exact Fourier phase shift per velocity node
  semi_lagrangian,  // clipped cubic interpolation, positivity preserving
};

enum class XiFlux {
  upwind,   // first-order donor cell, positivity preserving
  logmean,  // Maxwellian-weighted logarithmic mean; exact free-energy exchange
};

struct KineticOptions {
  double dt = 0.0;
  XTransport x_transport = XTransport::spectral;
  XiFlux xi_flux = XiFlux::upwind;
  double cfl_limit = 0.9;
  /// Entries below this after a step count as positivity violations.
  double clip_threshold = -1e-13;
  // Stage switches, used to isolate stages in tests.
  bool x_transport_enabled = true;
  bool xi_transport_enabled = true;
  bool relaxation_enabled = true;
};

/// Negative entries removed after each step.
struct ClipAudit {
  std::size_t clipped_entries = 0;
  std::size_t violations = 0;  // entries below the clip threshold
  double clipped_mass = 0.0;
};

struct KineticState {
  PhaseField f;
  double time = 0.0;
  double eps = 1.0;
  double alpha = 1.0;
  KineticOptions config;
  ClipAudit audit;
  std::size_t steps = 0;
};

/// J = int (xi/eps)(f - rho M) dxi and its split on the sets
/// {|log(f / rho M)| >= |xi|/r} (J1) and the complement (J2).
struct FluxField {
  VectorField J;
  VectorField J1;
  VectorField J2;
  double r = 1.0;
};

/// f0 = rho0(x) M(xi).
PhaseField well_prepared(const GridField& rho0, const Maxwellian& M);

GridField compute_rho(const PhaseField& f);

FluxField compute_flux(const PhaseField& f, const Maxwellian& M, double eps, double r);

struct InitialDataReport {
  /// int (1 + |xi|^2 + |log f0|) f0, with 0 log 0 = 0.
  double moment_functional = 0.0;
  double entropy = 0.0;
  bool entropy_finite = true;
  std::size_t zero_entries = 0;
  /// (alpha, (1/alpha^2) int int wL_alpha(y) [g(x) - g(x-y)]^2), g = rho0 * wS.
  std::vector<std::pair<double, double>> interaction;
  double interaction_sup = 0.0;
};

/// Throws ValidationError for negative or non-finite entries.
InitialDataReport validate_initial(const PhaseField& f0, const ShortRangeKernel& ks, const LongRangeKernel& kl,
                                   std::span<const double> alphas);

/// Strang-split time stepper for eps^2 f_t + eps xi.grad_x f + eps F.grad_xi f = rho M - f.
class KineticStepper {
 public:
  KineticStepper(Maxwellian M, const ShortRangeKernel& ks, const LongRangeKernel& kl, double alpha);

  const Maxwellian& maxwellian() const noexcept { return M_; }
  const PotentialOperator& potentials() const noexcept { return potential_; }

  /// Advances one dt: half x-transport, half xi-transport, exact relaxation,
  /// half xi-transport, half x-transport. Throws StepSizeError on CFL violation.
  KineticState step(KineticState s) const;

  /// Largest dt satisfying the xi-transport CFL bound for the current force.
  double cfl_dt(const PhaseField& f, double eps, double cfl_limit) const;

 private:
  void transport_x(PhaseField& f, double tau, double eps, XTransport kind) const;
  void transport_xi(PhaseField& f, const VectorField& force, double tau, double eps, XiFlux kind) const;
  void relax(PhaseField& f, double dt, double eps) const;

  Maxwellian M_;
  PotentialOperator potential_;
  std::vector<double> maxwellian_1d_;
  std::vector<double> face_weight_1d_;  // discrete M at faces for the logmean flux
};

}  // namespace vch
