#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vch/diagnostics.hpp"
#include "vch/domain.hpp"
#include "vch/kernels.hpp"
#include "vch/kinetic.hpp"
#include "vch/macro.hpp"

namespace vch {

enum class Preset { uniform, single_mode, two_bump, random };

struct InitialSpec {
  Preset preset = Preset::single_mode;
  double amplitude = 0.1;
  int mode = 1;
  double rho_bar = 1.0;
  std::uint64_t seed = 1;
};

/// Run configuration. Unset optionals take defaults derived from other keys:
/// xi_max = 6 sqrt(D), sigma_S = L/32, support_R = L/8.
struct RunConfig {
  int dim = 1;
  std::size_t n = 128;
  std::size_t m = 64;
  double L = 1.0;
  std::optional<double> xi_max;
  double D = 1.0;
  std::optional<double> sigma_S;
  std::optional<double> support_R;

  std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05};
  std::optional<double> alpha;  // decoupled scale; alpha = eps when unset
  double T_final = 0.5;
  std::size_t checkpoints = 16;

  double cfl = 0.9;
  double dt_relax_ratio = 0.25;
  double macro_dt = 1e-4;

  InitialSpec initial;
  XTransport x_transport = XTransport::spectral;
  XiFlux xi_flux = XiFlux::upwind;

  std::string out_dir = "out";
  std::string run_id = "run";

  double resolved_xi_max() const;
  double resolved_sigma() const;
  double resolved_radius() const;
  double alpha_for(double eps) const { return alpha.value_or(eps); }

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Applies one `key = value` entry of `[section]`. Throws ConfigError on an
/// unknown key or malformed value.
void apply_config_entry(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value);

RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
/// Reads, parses and validates a config file.
RunConfig load_config(const std::filesystem::path& path);

/// Grids, kernels and Maxwellian shared by every run of a config.
struct Model {
  SpatialGrid sgrid;
  VelocityGrid vgrid;
  ShortRangeKernel ks;
  LongRangeKernel kl;
  Maxwellian M;
};

Model build_model(const RunConfig& cfg);
GridField initial_density(const RunConfig& cfg, const SpatialGrid& grid);

struct KineticRun {
  double eps = 0.0;
  double alpha = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
  std::vector<DiagnosticsRecord> records;  // t = 0 and every step
  std::vector<double> checkpoint_times;
  std::vector<GridField> rho;             // at checkpoints
  std::vector<GridField> phi;             // composite potential at checkpoints
  std::vector<double> xi_residual;        // at checkpoints
  ClipAudit audit;
  InitialDataReport initial;
  PhaseField final;
};

/// dt = min(cfl-bound, dt_relax_ratio * eps^2), rounded so that the step count
/// is a multiple of (checkpoints - 1). Writes diagnostics.csv and snapshots
/// under `dir` when given.
KineticRun run_kinetic(const RunConfig& cfg, const Model& model, double eps,
                       const std::optional<std::filesystem::path>& dir = {});

MacroRun run_macro(const RunConfig& cfg, const Model& model, const std::optional<std::filesystem::path>& dir = {});

struct SweepEntry {
  double eps = 0.0;
  double alpha = 0.0;
  bool ok = false;
  std::string error;
  double dt = 0.0;
  std::size_t steps = 0;
  double rho_l1 = 0.0;  // L1_t L1_x
  double rho_l2 = 0.0;  // L2_t L1_x
  double phi_l1 = 0.0;  // L1_t Linf_x
  double phi_l2 = 0.0;  // L2_t Linf_x
  double xi_residual_integral = 0.0;
  double xi_residual_final = 0.0;
  bool flux_bound_ok = false;
  bool flux_split_ok = false;
  bool ck_ok = false;
  std::size_t clipped_entries = 0;
  std::size_t clip_violations = 0;
};

struct ConvergenceReport {
  std::vector<SweepEntry> entries;
  /// Log-log slopes between consecutive successful entries.
  std::vector<double> rho_slopes;
  std::vector<double> phi_slopes;
  std::vector<double> xi_slopes;
  bool coupled = true;  // alpha = eps; convergence is asserted only then
  bool rho_monotone = false;
  bool xi_monotone = false;
  std::size_t successes = 0;

  bool converged() const noexcept { return !coupled || (rho_monotone && xi_monotone); }
};

/// Distances between two sequences of fields sampled at uniform times on
/// [0, T], trapezoid rule in time.
double lp_time_l1_space(const std::vector<GridField>& a, const std::vector<GridField>& b, double T, int p);
double lp_time_linf_space(const std::vector<GridField>& a, const std::vector<GridField>& b, double T, int p);

/// Macro run, then one kinetic run per eps on a bounded worker pool
/// (VCH_THREADS caps it). Throws Error when fewer than three eps succeed.
ConvergenceReport run_sweep(const RunConfig& cfg, const std::optional<std::filesystem::path>& dir = {});

// CSV output.
void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<DiagnosticsRecord>& records);
void write_macro_csv(const std::filesystem::path& path, const std::vector<MacroRecord>& records);
void write_report_csv(const std::filesystem::path& path, const ConvergenceReport& report);
std::string diagnostics_csv_header();

/// Text summaries.
std::string render_report(const ConvergenceReport& report);
std::string render_kinetic(const KineticRun& run);
std::string render_macro(const MacroRun& run);
/// Summarizes a run directory from its CSV files.
std::string render_directory(const std::filesystem::path& dir);

/// Re-evaluates diagnostics on a stored phase-space snapshot.
DiagnosticsRecord check_snapshot(const RunConfig& cfg, const std::filesystem::path& path, double eps);

}  // namespace vch
