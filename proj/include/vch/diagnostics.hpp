#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "vch/domain.hpp"
#include "vch/kernels.hpp"
#include "vch/kinetic.hpp"
#include "vch/potentials.hpp"

namespace vch {

struct InteractionEnergy {
  double value = 0.0;
  /// Magnitude of the summed negative mode contributions (modes with 1 - wL < 0).
  double negative_part = 0.0;
};

/// (1/2 alpha^2) int int wL_alpha(y) [g(x) - g(x-y)]^2 dx dy with g = rho * wS,
/// evaluated in Fourier space.
InteractionEnergy interaction_energy(const GridField& rho, const ShortRangeKernel& ks, const LongRangeKernel& kl,
                                     double alpha);
InteractionEnergy interaction_energy(const GridField& rho, const PotentialOperator& op);

/// Same quantity as a direct sum over grid points and kernel atoms. Every
/// scaled atom must land on a grid point (ParameterError otherwise), e.g.
/// alpha = 1.
double interaction_energy_direct(const GridField& rho, const ShortRangeKernel& ks, const LongRangeKernel& kl,
                                 double alpha);

struct DissipationField {
  PhaseField field;          // degenerate nodes hold +inf
  GridField cell_norm;       // ||D(x, .)||_{L1_xi}, finite nodes only
  double norm = 0.0;         // L1 over (x, xi), finite nodes only
  std::size_t degenerate = 0;
  std::vector<bool> cell_degenerate;
};

/// (1/eps^2) (f - rho M)(log f - log rho M). Nodes where exactly one of f and
/// rho M vanishes are +inf, excluded from the norms and counted.
DissipationField dissipation_field(const PhaseField& f, const Maxwellian& M, double eps);

double total_mass(const PhaseField& f);
/// int |xi|^2 f.
double kinetic_energy(const PhaseField& f);
/// int f log f with 0 log 0 = 0.
double entropy(const PhaseField& f, std::size_t* zero_entries = nullptr);
/// (1/eps^2) int |xi|^2 (rho M - f).
double energy_rhs(const PhaseField& f, const Maxwellian& M, double eps);
/// (1/eps^2) int (rho M - f) log f; nodes with f = 0 are skipped and counted.
double entropy_rhs(const PhaseField& f, const Maxwellian& M, double eps, std::size_t* skipped = nullptr);

/// sqrt(I3(r)) with I3 = int r |xi| M(xi) (exp(|xi|/r) - 1) dxi on the velocity grid.
double flux_bound_constant(const Maxwellian& M, double r);

struct FluxBoundVerdict {
  double r = 1.0;
  double constant = 0.0;
  std::size_t cells = 0;
  std::size_t bound_ok = 0;  // |J| <= r eps ||D|| + C rho^1/2 ||D||^1/2
  std::size_t j1_ok = 0;     // |J1| <= eps ||D||
  std::size_t j2_ok = 0;     // |J2| <= C rho^1/2 ||D||^1/2
  double worst_bound_ratio = 0.0;

  bool bound_holds() const noexcept { return bound_ok == cells; }
  bool split_holds() const noexcept { return j1_ok == cells && j2_ok == cells; }
};

FluxBoundVerdict check_flux_bounds(const PhaseField& f, const Maxwellian& M, double eps, double r);

struct CsiszarKullback {
  double lhs = 0.0;  // ||f - g||_1^2
  double rhs = 0.0;  // ||f||_1 int (f - g)(log f - log g)
  bool holds = true;
};

/// Both arrays on a common quadrature with node weight `weight`. Throws
/// ParameterError if the discrete masses differ by more than 1e-12 relative.
CsiszarKullback csiszar_kullback_check(std::span<const double> f, std::span<const double> g, double weight);

/// int_x || int_xi xi (x) xi (f - rho M) dxi ||_F dx.
double xi_tensor_residual(const PhaseField& f, const Maxwellian& M);

double flux_l1(const FluxField& J);
/// int |J| sqrt(log log max(|J|, e)) dx.
double flux_loglog_norm(const FluxField& J);

struct DiagnosticsRecord {
  double time = 0.0;
  double mass = 0.0;
  double kinetic_energy = 0.0;
  double interaction_energy = 0.0;
  double interaction_negative = 0.0;
  double total_energy = 0.0;
  double entropy = 0.0;
  double free_energy = 0.0;
  double dissipation_norm = 0.0;
  double flux_l1 = 0.0;
  double flux_loglog = 0.0;
  double xi_residual = 0.0;
  double energy_rhs = 0.0;
  double entropy_rhs = 0.0;
  double res_energy = std::numeric_limits<double>::quiet_NaN();
  double res_entropy = std::numeric_limits<double>::quiet_NaN();
  double res_free = std::numeric_limits<double>::quiet_NaN();
  bool flux_bound_ok = true;
  bool flux_split_ok = true;
  bool ck_ok = true;
  std::size_t zero_entries = 0;
  std::size_t degenerate_nodes = 0;
};

std::span<const double> default_radii();

/// Evaluates every functional on a kinetic state. Flux bounds are checked for
/// each r in `radii`; the flags are the conjunction.
DiagnosticsRecord evaluate(const KineticState& s, const KineticStepper& stepper,
                           std::span<const double> radii = default_radii());

struct IdentityCheck {
  /// residual_n = (Q_{n+1} - Q_n)/dt - (rhs_n + rhs_{n+1})/2
  std::vector<double> residuals;
  double max_abs = 0.0;
  double dt = 0.0;
};

struct FreeEnergyCheck : IdentityCheck {
  double tolerance = 0.0;  // F_{n+1} - F_n <= tolerance dt^2
  std::size_t monotonicity_violations = 0;
  bool monotone() const noexcept { return monotonicity_violations == 0; }
};

/// Records must be at least three, uniformly spaced in time.
IdentityCheck check_energy_identity(std::span<const DiagnosticsRecord> records);
IdentityCheck check_entropy_identity(std::span<const DiagnosticsRecord> records);
/// Without an explicit tolerance, uses max|residual| / dt.
FreeEnergyCheck check_free_energy_identity(std::span<const DiagnosticsRecord> records, double diffusion,
                                           double tolerance = -1.0);

/// Writes the residual columns of `records` in place.
void fill_residuals(std::span<DiagnosticsRecord> records, double diffusion);

}  // namespace vch
