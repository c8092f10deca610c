#include "vch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "vch/errors.hpp"
#include "vch/snapshot.hpp"

namespace vch {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

std::string checkpoint_name(const char* stem, std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03zu.vchf", stem, j);
  return buf;
}

void write_index(const fs::path& dir, const std::vector<double>& times, const char* stem) {
  auto os = open_out(dir / "index.csv");
  os << "index,t,file\n";
  for (std::size_t j = 0; j < times.size(); ++j) os << j << ',' << num(times[j]) << ',' << checkpoint_name(stem, j) << '\n';
}

std::size_t steps_for(double T, double dt, std::size_t intervals) {
  auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  return std::max<std::size_t>(1, (steps + intervals - 1) / intervals) * intervals;
}

double min_image(double d, double L) { return d - L * std::round(d / L); }

}  // namespace

// ---------------------------------------------------------------------------

Model build_model(const RunConfig& cfg) {
  cfg.validate();
  Model m;
  m.sgrid = SpatialGrid(cfg.dim, cfg.n, cfg.L);
  m.vgrid = VelocityGrid(cfg.dim, cfg.m, cfg.resolved_xi_max());
  m.ks = make_short_kernel(m.sgrid, cfg.resolved_sigma());
  m.kl = make_long_kernel(m.sgrid, cfg.resolved_radius());
  m.M = make_maxwellian(m.vgrid, cfg.D);
  return m;
}

GridField initial_density(const RunConfig& cfg, const SpatialGrid& grid) {
  const auto& ic = cfg.initial;
  const double L = grid.period();
  GridField rho(grid, ic.rho_bar);
  if (ic.preset == Preset::uniform || ic.amplitude == 0.0) return rho;

  std::vector<double> psi(grid.size(), 0.0);
  auto coord = [&](std::size_t c) {
    const auto idx = grid.index(c);
    return std::array<double, 2>{grid.coordinate(idx[0]), grid.dim() == 2 ? grid.coordinate(idx[1]) : 0.0};
  };
  switch (ic.preset) {
    case Preset::single_mode:
      for (std::size_t c = 0; c < grid.size(); ++c) psi[c] = std::cos(2.0 * std::numbers::pi * ic.mode * coord(c)[0] / L);
      break;
    case Preset::two_bump: {
      const double w = L / 16.0;
      for (std::size_t c = 0; c < grid.size(); ++c) {
        const auto x = coord(c);
        for (double centre : {0.25 * L, 0.75 * L}) {
          double r2 = 0.0;
          for (int a = 0; a < grid.dim(); ++a) r2 += std::pow(min_image(x[a] - centre, L), 2);
          psi[c] += std::exp(-r2 / (2.0 * w * w));
        }
      }
      break;
    }
    case Preset::random: {
      std::mt19937_64 gen(ic.seed);
      auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
      for (int k = 1; k <= 4; ++k) {
        const double amp = uniform() / k;
        const double phase = 2.0 * std::numbers::pi * uniform();
        const int ky = grid.dim() == 2 ? static_cast<int>(gen() % 3) - 1 : 0;
        for (std::size_t c = 0; c < grid.size(); ++c) {
          const auto x = coord(c);
          psi[c] += amp * std::cos(2.0 * std::numbers::pi * (k * x[0] + ky * x[1]) / L + phase);
        }
      }
      break;
    }
    case Preset::uniform:
      break;
  }
  double mean = 0.0;
  for (double v : psi) mean += v;
  mean /= static_cast<double>(psi.size());
  double peak = 0.0;
  for (double& v : psi) {
    v -= mean;
    peak = std::max(peak, std::abs(v));
  }
  if (peak == 0.0) return rho;
  for (std::size_t c = 0; c < grid.size(); ++c) rho.values[c] = ic.rho_bar * (1.0 + ic.amplitude * psi[c] / peak);
  return rho;
}

// ---------------------------------------------------------------------------

KineticRun run_kinetic(const RunConfig& cfg, const Model& model, double eps, const std::optional<fs::path>& dir) {
  if (!(eps > 0.0)) throw ParameterError("run_kinetic: eps must be positive");
  KineticRun run;
  run.eps = eps;
  run.alpha = cfg.alpha_for(eps);
  KineticStepper stepper(model.M, model.ks, model.kl, run.alpha);

  KineticState s;
  s.f = well_prepared(initial_density(cfg, model.sgrid), model.M);
  s.eps = eps;
  s.alpha = run.alpha;
  s.config.x_transport = cfg.x_transport;
  s.config.xi_flux = cfg.xi_flux;
  s.config.cfl_limit = cfg.cfl;
  const double alphas[] = {run.alpha};
  run.initial = validate_initial(s.f, model.ks, model.kl, alphas);

  const double dt_target = std::min(stepper.cfl_dt(s.f, eps, cfg.cfl), cfg.dt_relax_ratio * eps * eps);
  const std::size_t intervals = cfg.checkpoints - 1;
  run.steps = steps_for(cfg.T_final, dt_target, intervals);
  run.dt = cfg.T_final / static_cast<double>(run.steps);
  s.config.dt = run.dt;
  const std::size_t stride = run.steps / intervals;

  auto checkpoint = [&](std::size_t j) {
    run.checkpoint_times.push_back(s.time);
    const auto rho = compute_rho(s.f);
    run.phi.push_back(stepper.potentials().total(rho));
    run.rho.push_back(rho);
    run.xi_residual.push_back(xi_tensor_residual(s.f, model.M));
    if (dir) {
      write_snapshot(*dir / "snapshots" / checkpoint_name("f", j), s.f);
      write_snapshot(*dir / "snapshots" / checkpoint_name("rho", j), rho);
    }
  };

  run.records.push_back(evaluate(s, stepper));
  checkpoint(0);
  for (std::size_t k = 1; k <= run.steps; ++k) {
    s = stepper.step(std::move(s));
    if (k == run.steps) s.time = cfg.T_final;
    run.records.push_back(evaluate(s, stepper));
    if (k % stride == 0) checkpoint(k / stride);
  }
  fill_residuals(run.records, cfg.D);
  run.audit = s.audit;
  run.final = std::move(s.f);
  if (dir) {
    write_diagnostics_csv(*dir / "diagnostics.csv", run.records);
    write_index(*dir / "snapshots", run.checkpoint_times, "f");
  }
  return run;
}

MacroRun run_macro(const RunConfig& cfg, const Model& model, const std::optional<fs::path>& dir) {
  MacroSolver solver(model.ks, cfg.D, limit_coefficient(model.kl));
  MacroOptions opt;
  opt.dt = cfg.macro_dt;
  opt.cfl_limit = cfg.cfl;
  auto run = vch::run_macro(solver, initial_density(cfg, model.sgrid), cfg.T_final, opt, cfg.checkpoints);
  if (dir) {
    write_macro_csv(*dir / "diagnostics.csv", run.records);
    std::vector<double> times;
    for (std::size_t j = 0; j < run.checkpoints.size(); ++j) {
      times.push_back(cfg.T_final * static_cast<double>(j) / static_cast<double>(run.checkpoints.size() - 1));
      write_snapshot(*dir / "snapshots" / checkpoint_name("rho", j), run.checkpoints[j]);
    }
    write_index(*dir / "snapshots", times, "rho");
  }
  return run;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Dist>
double lp_time(const std::vector<GridField>& a, const std::vector<GridField>& b, double T, int p, Dist dist) {
  if (a.size() != b.size() || a.size() < 2) throw DimensionError("time norm: sequences differ in length");
  if (p != 1 && p != 2) throw ParameterError("time norm: p must be 1 or 2");
  const double h = T / static_cast<double>(a.size() - 1);
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (!(a[j].grid == b[j].grid)) throw DimensionError("time norm: fields on different grids");
    const double w = (j == 0 || j + 1 == a.size()) ? 0.5 * h : h;
    s += w * std::pow(dist(a[j], b[j]), p);
  }
  return std::pow(s, 1.0 / p);
}

}  // namespace

double lp_time_l1_space(const std::vector<GridField>& a, const std::vector<GridField>& b, double T, int p) {
  return lp_time(a, b, T, p, [](const GridField& x, const GridField& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.values.size(); ++i) s += std::abs(x.values[i] - y.values[i]);
    return s * x.grid.cell_volume();
  });
}

double lp_time_linf_space(const std::vector<GridField>& a, const std::vector<GridField>& b, double T, int p) {
  return lp_time(a, b, T, p, [](const GridField& x, const GridField& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.values.size(); ++i) s = std::max(s, std::abs(x.values[i] - y.values[i]));
    return s;
  });
}

namespace {

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VCH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

std::vector<double> slopes(const std::vector<SweepEntry>& ok, double SweepEntry::*field) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < ok.size(); ++i) {
    const double a = ok[i].*field, b = ok[i + 1].*field;
    out.push_back(a > 0.0 && b > 0.0 ? std::log(b / a) / std::log(ok[i + 1].eps / ok[i].eps)
                                     : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

bool strictly_decreasing(const std::vector<SweepEntry>& ok, double SweepEntry::*field) {
  for (std::size_t i = 0; i + 1 < ok.size(); ++i) {
    if (!(ok[i + 1].*field < ok[i].*field)) return false;
  }
  return true;
}

}  // namespace

ConvergenceReport run_sweep(const RunConfig& cfg, const std::optional<fs::path>& dir) {
  const Model model = build_model(cfg);
  const auto macro = run_macro(cfg, model, dir ? std::optional(*dir / "macro") : std::nullopt);
  MacroSolver solver(model.ks, cfg.D, limit_coefficient(model.kl));
  std::vector<GridField> macro_phi;
  for (const auto& rho : macro.checkpoints) macro_phi.push_back(solver.potential(rho));

  ConvergenceReport report;
  report.coupled = !cfg.alpha.has_value();
  report.entries.resize(cfg.eps_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cfg.eps_list.size(); k = next++) {
      SweepEntry& e = report.entries[k];
      e.eps = cfg.eps_list[k];
      e.alpha = cfg.alpha_for(e.eps);
      try {
        std::optional<fs::path> sub;
        if (dir) sub = *dir / ("eps_" + std::to_string(k));
        const auto run = run_kinetic(cfg, model, e.eps, sub);
        e.dt = run.dt;
        e.steps = run.steps;
        e.rho_l1 = lp_time_l1_space(run.rho, macro.checkpoints, cfg.T_final, 1);
        e.rho_l2 = lp_time_l1_space(run.rho, macro.checkpoints, cfg.T_final, 2);
        e.phi_l1 = lp_time_linf_space(run.phi, macro_phi, cfg.T_final, 1);
        e.phi_l2 = lp_time_linf_space(run.phi, macro_phi, cfg.T_final, 2);
        const double h = cfg.T_final / static_cast<double>(run.xi_residual.size() - 1);
        for (std::size_t j = 0; j < run.xi_residual.size(); ++j) {
          const double w = (j == 0 || j + 1 == run.xi_residual.size()) ? 0.5 * h : h;
          e.xi_residual_integral += w * run.xi_residual[j];
        }
        e.xi_residual_final = run.xi_residual.back();
        e.flux_bound_ok = e.flux_split_ok = e.ck_ok = true;
        for (const auto& r : run.records) {
          e.flux_bound_ok = e.flux_bound_ok && r.flux_bound_ok;
          e.flux_split_ok = e.flux_split_ok && r.flux_split_ok;
          e.ck_ok = e.ck_ok && r.ck_ok;
        }
        e.clipped_entries = run.audit.clipped_entries;
        e.clip_violations = run.audit.violations;
        e.ok = true;
      } catch (const std::exception& ex) {
        e.ok = false;
        e.error = ex.what();
      }
    }
  };
  const std::size_t workers = worker_count(cfg.eps_list.size());
  std::vector<std::jthread> pool;
  for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  pool.clear();

  std::vector<SweepEntry> ok;
  for (const auto& e : report.entries) {
    if (e.ok) ok.push_back(e);
  }
  report.successes = ok.size();
  report.rho_slopes = slopes(ok, &SweepEntry::rho_l1);
  report.phi_slopes = slopes(ok, &SweepEntry::phi_l1);
  report.xi_slopes = slopes(ok, &SweepEntry::xi_residual_integral);
  report.rho_monotone = ok.size() >= 2 && strictly_decreasing(ok, &SweepEntry::rho_l1);
  report.xi_monotone = ok.size() >= 2 && strictly_decreasing(ok, &SweepEntry::xi_residual_integral);
  if (dir) write_report_csv(*dir / "report.csv", report);
  if (report.successes < 3) {
    std::ostringstream os;
    os << "sweep: only " << report.successes << " of " << report.entries.size() << " eps values succeeded";
    for (const auto& e : report.entries) {
      if (!e.ok) os << "; eps = " << e.eps << ": " << e.error;
    }
    throw Error(os.str());
  }
  return report;
}

// ---------------------------------------------------------------------------

std::string diagnostics_csv_header() {
  return "t,mass,E_kin,E_int,E_total,S,F,D_norm,J_l1,J_loglog,R_xi,res_energy,res_entropy,res_free,flux_bound_ok,"
         "flux_split_ok,ck_ok";
}

void write_diagnostics_csv(const fs::path& path, const std::vector<DiagnosticsRecord>& records) {
  auto os = open_out(path);
  os << diagnostics_csv_header() << '\n';
  for (const auto& r : records) {
    os << num(r.time) << ',' << num(r.mass) << ',' << num(r.kinetic_energy) << ',' << num(r.interaction_energy) << ','
       << num(r.total_energy) << ',' << num(r.entropy) << ',' << num(r.free_energy) << ',' << num(r.dissipation_norm)
       << ',' << num(r.flux_l1) << ',' << num(r.flux_loglog) << ',' << num(r.xi_residual) << ','
       << num(r.res_energy) << ',' << num(r.res_entropy) << ',' << num(r.res_free) << ',' << int(r.flux_bound_ok) << ','
       << int(r.flux_split_ok) << ',' << int(r.ck_ok) << '\n';
  }
  if (!os) throw IoError("write failed: " + path.string());
}

void write_macro_csv(const fs::path& path, const std::vector<MacroRecord>& records) {
  auto os = open_out(path);
  os << "t,mass,min_rho,free_energy_surrogate\n";
  for (const auto& r : records) {
    os << num(r.time) << ',' << num(r.mass) << ',' << num(r.min_rho) << ',' << num(r.free_energy_surrogate) << '\n';
  }
  if (!os) throw IoError("write failed: " + path.string());
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

void write_report_csv(const fs::path& path, const ConvergenceReport& report) {
  auto os = open_out(path);
  os << "eps,alpha,status,dt,steps,rho_L1t_L1x,rho_L2t_L1x,phi_L1t_Linf,phi_L2t_Linf,R_xi_integral,R_xi_final,"
        "flux_bound_ok,flux_split_ok,ck_ok,clipped_entries,clip_violations,error\n";
  for (const auto& e : report.entries) {
    os << num(e.eps) << ',' << num(e.alpha) << ',' << (e.ok ? "ok" : "failed") << ',' << num(e.dt) << ',' << e.steps
       << ',' << num(e.rho_l1) << ',' << num(e.rho_l2) << ',' << num(e.phi_l1) << ',' << num(e.phi_l2) << ','
       << num(e.xi_residual_integral) << ',' << num(e.xi_residual_final) << ',' << int(e.flux_bound_ok) << ','
       << int(e.flux_split_ok) << ',' << int(e.ck_ok) << ',' << e.clipped_entries << ',' << e.clip_violations << ','
       << quote(e.error) << '\n';
  }
  if (!os) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------

namespace {

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + short_num(v[i]);
  return s;
}

}  // namespace

std::string render_report(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "eps        alpha      status  rho L1tL1x   phi L1tLinf  R_xi int     steps\n";
  for (const auto& e : r.entries) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10.4g %-10.4g %-7s %-12.4e %-12.4e %-12.4e %zu\n", e.eps, e.alpha,
                  e.ok ? "ok" : "failed", e.rho_l1, e.phi_l1, e.xi_residual_integral, e.steps);
    os << line;
    if (!e.ok) os << "  error: " << e.error << '\n';
  }
  os << "rho slopes: " << join(r.rho_slopes) << '\n';
  os << "phi slopes: " << join(r.phi_slopes) << '\n';
  os << "R_xi slopes: " << join(r.xi_slopes) << '\n';
  if (r.coupled) {
    os << "rho distance strictly decreasing: " << (r.rho_monotone ? "yes" : "no") << '\n';
    os << "R_xi strictly decreasing: " << (r.xi_monotone ? "yes" : "no") << '\n';
  } else {
    os << "alpha decoupled from eps: no convergence assertion\n";
  }
  return os.str();
}

std::string render_kinetic(const KineticRun& run) {
  std::ostringstream os;
  const auto& a = run.records.front();
  const auto& b = run.records.back();
  std::size_t flags = 0, mono = 0;
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    const auto& r = run.records[i];
    if (!(r.flux_bound_ok && r.flux_split_ok && r.ck_ok)) ++flags;
    if (i > 0 && r.free_energy > run.records[i - 1].free_energy) ++mono;
  }
  os << "eps = " << run.eps << ", alpha = " << run.alpha << ", dt = " << run.dt << ", steps = " << run.steps << '\n';
  os << "mass drift (relative): " << short_num(std::abs(b.mass - a.mass) / a.mass) << '\n';
  os << "free energy: " << num(a.free_energy) << " -> " << num(b.free_energy) << " (" << mono << " increases)\n";
  os << "R_xi at T: " << short_num(b.xi_residual) << '\n';
  os << "records failing a flux or Csiszar-Kullback check: " << flags << '\n';
  os << "clipped entries: " << run.audit.clipped_entries << " (violations " << run.audit.violations
     << ", mass " << short_num(run.audit.clipped_mass) << ")\n";
  return os.str();
}

std::string render_macro(const MacroRun& run) {
  std::ostringstream os;
  const auto& a = run.records.front();
  const auto& b = run.records.back();
  double min_rho = a.min_rho;
  std::size_t increases = 0;
  for (std::size_t i = 1; i < run.records.size(); ++i) {
    min_rho = std::min(min_rho, run.records[i].min_rho);
    if (run.records[i].free_energy_surrogate > run.records[i - 1].free_energy_surrogate) ++increases;
  }
  os << "steps = " << run.final.steps << ", dt = " << run.final.config.dt << '\n';
  os << "mass drift (relative): " << short_num(std::abs(b.mass - a.mass) / a.mass) << '\n';
  os << "min rho over run: " << short_num(min_rho) << '\n';
  os << "surrogate free energy: " << num(a.free_energy_surrogate) << " -> " << num(b.free_energy_surrogate) << " ("
     << increases << " increases)\n";
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IoError("CSV is missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
  double value(std::size_t row, const std::string& name) const {
    return std::strtod(rows[row].at(column(name)).c_str(), nullptr);
  }
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

Table read_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw IoError(path.string() + ": empty file");
  t.header = split_csv(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split_csv(line));
    if (t.rows.back().size() != t.header.size()) throw IoError(path.string() + ": ragged row");
  }
  return t;
}

}  // namespace

std::string render_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::ostringstream os;
  if (fs::exists(dir / "report.csv")) {
    const auto t = read_csv(dir / "report.csv");
    ConvergenceReport r;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      SweepEntry e;
      e.eps = t.value(i, "eps");
      e.alpha = t.value(i, "alpha");
      e.ok = t.rows[i][t.column("status")] == "ok";
      e.steps = static_cast<std::size_t>(t.value(i, "steps"));
      e.rho_l1 = t.value(i, "rho_L1t_L1x");
      e.phi_l1 = t.value(i, "phi_L1t_Linf");
      e.xi_residual_integral = t.value(i, "R_xi_integral");
      e.error = t.rows[i][t.column("error")];
      r.coupled = r.coupled && e.alpha == e.eps;
      r.entries.push_back(e);
    }
    std::vector<SweepEntry> ok;
    for (const auto& e : r.entries) {
      if (e.ok) ok.push_back(e);
    }
    r.rho_slopes = slopes(ok, &SweepEntry::rho_l1);
    r.phi_slopes = slopes(ok, &SweepEntry::phi_l1);
    r.xi_slopes = slopes(ok, &SweepEntry::xi_residual_integral);
    r.rho_monotone = ok.size() >= 2 && strictly_decreasing(ok, &SweepEntry::rho_l1);
    r.xi_monotone = ok.size() >= 2 && strictly_decreasing(ok, &SweepEntry::xi_residual_integral);
    os << render_report(r);
    return os.str();
  }
  if (!fs::exists(dir / "diagnostics.csv")) throw IoError(dir.string() + ": no report.csv or diagnostics.csv");
  const auto t = read_csv(dir / "diagnostics.csv");
  if (t.rows.empty()) throw IoError(dir.string() + ": diagnostics.csv has no rows");
  const std::size_t last = t.rows.size() - 1;
  const double m0 = t.value(0, "mass"), m1 = t.value(last, "mass");
  os << "records: " << t.rows.size() << ", t in [" << t.value(0, "t") << ", " << t.value(last, "t") << "]\n";
  os << "mass drift (relative): " << short_num(std::abs(m1 - m0) / m0) << '\n';
  if (std::find(t.header.begin(), t.header.end(), "F") != t.header.end()) {
    std::size_t increases = 0, flags = 0;
    double res[3] = {0.0, 0.0, 0.0};
    const char* names[3] = {"res_energy", "res_entropy", "res_free"};
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (i > 0 && t.value(i, "F") > t.value(i - 1, "F")) ++increases;
      if (t.value(i, "flux_bound_ok") == 0.0 || t.value(i, "flux_split_ok") == 0.0 || t.value(i, "ck_ok") == 0.0) ++flags;
      for (int k = 0; k < 3; ++k) {
        const double v = t.value(i, names[k]);
        if (std::isfinite(v)) res[k] = std::max(res[k], std::abs(v));
      }
    }
    os << "free energy: " << t.value(0, "F") << " -> " << t.value(last, "F") << " (" << increases << " increases)\n";
    os << "max |residual| energy " << short_num(res[0]) << ", entropy " << short_num(res[1]) << ", free "
       << short_num(res[2]) << '\n';
    os << "R_xi at end: " << short_num(t.value(last, "R_xi")) << '\n';
    os << "records failing a flux or Csiszar-Kullback check: " << flags << '\n';
  } else {
    double min_rho = t.value(0, "min_rho");
    for (std::size_t i = 0; i < t.rows.size(); ++i) min_rho = std::min(min_rho, t.value(i, "min_rho"));
    os << "min rho over run: " << short_num(min_rho) << '\n';
    os << "surrogate free energy: " << t.value(0, "free_energy_surrogate") << " -> "
       << t.value(last, "free_energy_surrogate") << '\n';
  }
  return os.str();
}

DiagnosticsRecord check_snapshot(const RunConfig& cfg, const fs::path& path, double eps) {
  const auto snap = read_snapshot(path);
  if (!snap.is_phase_field()) throw ValidationError("check: " + path.string() + " is not a phase-space snapshot");
  const Model model = build_model(cfg);
  const auto f = snap.phase_field();
  if (!(f.sgrid == model.sgrid) || !(f.vgrid == model.vgrid)) {
    throw ValidationError("check: snapshot grids do not match the configuration");
  }
  if (!(eps > 0.0)) throw ParameterError("check: eps must be positive");
  KineticStepper stepper(model.M, model.ks, model.kl, cfg.alpha_for(eps));
  KineticState s;
  s.f = f;
  s.eps = eps;
  s.alpha = cfg.alpha_for(eps);
  for (double v : f.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("check: snapshot holds negative or non-finite values");
  }
  return evaluate(s, stepper);
}

}  // namespace vch
