#include "vch/vch.h"

#include <cstring>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

#include "vch/errors.hpp"
#include "vch/harness.hpp"
#include "vch/snapshot.hpp"

struct vch_config {
  vch::RunConfig cfg;
};

struct vch_report {
  std::string text;
  bool passed = true;
  std::string output_dir;
  std::map<std::string, double> metrics;
};

namespace {

thread_local std::string last_error;

vch_status fail(vch_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <typename Fn>
vch_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return VCH_OK;
  } catch (const vch::ConfigError& e) {
    return fail(VCH_ERR_VALIDATION, e.what());
  } catch (const vch::ValidationError& e) {
    return fail(VCH_ERR_VALIDATION, e.what());
  } catch (const vch::ParameterError& e) {
    return fail(VCH_ERR_VALIDATION, e.what());
  } catch (const vch::DimensionError& e) {
    return fail(VCH_ERR_VALIDATION, e.what());
  } catch (const vch::IoError& e) {
    return fail(VCH_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(VCH_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(VCH_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(VCH_ERR_RUNTIME, e.what());
  }
}

std::optional<std::filesystem::path> run_dir(const vch::RunConfig& cfg, const char* out_dir) {
  if (out_dir == nullptr) return std::nullopt;
  const std::string base = *out_dir ? out_dir : cfg.out_dir;
  return std::filesystem::path(base) / cfg.run_id;
}

void add_record(vch_report& r, const vch::DiagnosticsRecord& d, const std::string& prefix) {
  r.metrics[prefix + "mass"] = d.mass;
  r.metrics[prefix + "E_kin"] = d.kinetic_energy;
  r.metrics[prefix + "E_int"] = d.interaction_energy;
  r.metrics[prefix + "E_total"] = d.total_energy;
  r.metrics[prefix + "S"] = d.entropy;
  r.metrics[prefix + "F"] = d.free_energy;
  r.metrics[prefix + "D_norm"] = d.dissipation_norm;
  r.metrics[prefix + "J_l1"] = d.flux_l1;
  r.metrics[prefix + "J_loglog"] = d.flux_loglog;
  r.metrics[prefix + "R_xi"] = d.xi_residual;
  r.metrics[prefix + "flux_bound_ok"] = d.flux_bound_ok;
  r.metrics[prefix + "flux_split_ok"] = d.flux_split_ok;
  r.metrics[prefix + "ck_ok"] = d.ck_ok;
}

}  // namespace

extern "C" {

const char* vch_version(void) { return "1.0.0"; }

const char* vch_last_error(void) { return last_error.c_str(); }

const char* vch_status_name(vch_status status) {
  switch (status) {
    case VCH_OK:
      return "ok";
    case VCH_ERR_VALIDATION:
      return "validation error";
    case VCH_ERR_RUNTIME:
      return "runtime error";
    case VCH_ERR_IO:
      return "i/o error";
    case VCH_ERR_ARGUMENT:
      return "invalid argument";
  }
  return "unknown";
}

vch_status vch_config_default(vch_config** out) {
  if (out == nullptr) return fail(VCH_ERR_ARGUMENT, "null output pointer");
  *out = nullptr;
  return guarded([&] { *out = new vch_config{}; });
}

vch_status vch_config_load(const char* path, vch_config** out) {
  if (out == nullptr || path == nullptr) return fail(VCH_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new vch_config{vch::load_config(path)}; });
}

vch_status vch_config_set(vch_config* config, const char* section, const char* key, const char* value) {
  if (config == nullptr || section == nullptr || key == nullptr || value == nullptr) {
    return fail(VCH_ERR_ARGUMENT, "null argument");
  }
  return guarded([&] {
    vch::RunConfig copy = config->cfg;
    vch::apply_config_entry(copy, section, key, value);
    config->cfg = std::move(copy);
  });
}

vch_status vch_config_validate(const vch_config* config) {
  if (config == nullptr) return fail(VCH_ERR_ARGUMENT, "null config");
  return guarded([&] { config->cfg.validate(); });
}

void vch_config_free(vch_config* config) { delete config; }

vch_status vch_run_kinetic(const vch_config* config, double eps, const char* out_dir, vch_report** out) {
  if (config == nullptr || out == nullptr) return fail(VCH_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto& cfg = config->cfg;
    const auto model = vch::build_model(cfg);
    const double e = eps > 0.0 ? eps : cfg.eps_list.front();
    const auto dir = run_dir(cfg, out_dir);
    const auto run = vch::run_kinetic(cfg, model, e, dir);
    auto r = std::make_unique<vch_report>();
    r->text = vch::render_kinetic(run);
    if (dir) r->output_dir = dir->string();
    std::size_t failures = 0;
    for (const auto& rec : run.records) {
      if (!(rec.flux_bound_ok && rec.flux_split_ok && rec.ck_ok)) ++failures;
    }
    r->passed = failures == 0 && run.audit.violations == 0;
    r->metrics["eps"] = run.eps;
    r->metrics["alpha"] = run.alpha;
    r->metrics["dt"] = run.dt;
    r->metrics["steps"] = static_cast<double>(run.steps);
    r->metrics["check_failures"] = static_cast<double>(failures);
    r->metrics["clipped_entries"] = static_cast<double>(run.audit.clipped_entries);
    r->metrics["clip_violations"] = static_cast<double>(run.audit.violations);
    r->metrics["initial_interaction_sup"] = run.initial.interaction_sup;
    add_record(*r, run.records.front(), "initial.");
    add_record(*r, run.records.back(), "final.");
    *out = r.release();
  });
}

vch_status vch_run_macro(const vch_config* config, const char* out_dir, vch_report** out) {
  if (config == nullptr || out == nullptr) return fail(VCH_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto& cfg = config->cfg;
    const auto model = vch::build_model(cfg);
    const auto dir = run_dir(cfg, out_dir);
    const auto run = vch::run_macro(cfg, model, dir);
    auto r = std::make_unique<vch_report>();
    r->text = vch::render_macro(run);
    if (dir) r->output_dir = dir->string();
    double min_rho = run.records.front().min_rho;
    for (const auto& rec : run.records) min_rho = std::min(min_rho, rec.min_rho);
    r->passed = min_rho >= 0.0;
    r->metrics["steps"] = static_cast<double>(run.final.steps);
    r->metrics["dt"] = run.final.config.dt;
    r->metrics["min_rho"] = min_rho;
    r->metrics["initial.mass"] = run.records.front().mass;
    r->metrics["final.mass"] = run.records.back().mass;
    r->metrics["initial.surrogate"] = run.records.front().free_energy_surrogate;
    r->metrics["final.surrogate"] = run.records.back().free_energy_surrogate;
    *out = r.release();
  });
}

vch_status vch_run_sweep(const vch_config* config, const char* out_dir, vch_report** out) {
  if (config == nullptr || out == nullptr) return fail(VCH_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto& cfg = config->cfg;
    const auto dir = run_dir(cfg, out_dir);
    const auto report = vch::run_sweep(cfg, dir);
    auto r = std::make_unique<vch_report>();
    r->text = vch::render_report(report);
    if (dir) r->output_dir = dir->string();
    r->passed = report.converged();
    r->metrics["successes"] = static_cast<double>(report.successes);
    r->metrics["coupled"] = report.coupled;
    r->metrics["rho_monotone"] = report.rho_monotone;
    r->metrics["xi_monotone"] = report.xi_monotone;
    for (std::size_t k = 0; k < report.entries.size(); ++k) {
      const auto& e = report.entries[k];
      const std::string p = "entry" + std::to_string(k) + ".";
      r->metrics[p + "eps"] = e.eps;
      r->metrics[p + "ok"] = e.ok;
      r->metrics[p + "rho_l1"] = e.rho_l1;
      r->metrics[p + "rho_l2"] = e.rho_l2;
      r->metrics[p + "phi_l1"] = e.phi_l1;
      r->metrics[p + "phi_l2"] = e.phi_l2;
      r->metrics[p + "xi_residual_integral"] = e.xi_residual_integral;
    }
    *out = r.release();
  });
}

vch_status vch_check_snapshot(const vch_config* config, const char* path, double eps, vch_report** out) {
  if (path == nullptr || out == nullptr) return fail(VCH_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    vch::RunConfig cfg;
    if (config != nullptr) {
      cfg = config->cfg;
    } else {
      const auto h = vch::read_snapshot_header(path);
      cfg.dim = static_cast<int>(h.dim);
      cfg.n = h.n;
      cfg.m = h.m;
      cfg.L = h.period;
      cfg.xi_max = h.xi_max;
    }
    const double e = eps > 0.0 ? eps : cfg.eps_list.front();
    const auto rec = vch::check_snapshot(cfg, path, e);
    auto r = std::make_unique<vch_report>();
    r->passed = rec.flux_bound_ok && rec.flux_split_ok && rec.ck_ok;
    add_record(*r, rec, "");
    r->metrics["eps"] = e;
    std::ostringstream os;
    os << vch::diagnostics_csv_header() << '\n';
    os.precision(10);
    os << rec.time << ',' << rec.mass << ',' << rec.kinetic_energy << ',' << rec.interaction_energy << ','
       << rec.total_energy << ',' << rec.entropy << ',' << rec.free_energy << ',' << rec.dissipation_norm << ','
       << rec.flux_l1 << ',' << rec.flux_loglog << ',' << rec.xi_residual << ",nan,nan,nan," << rec.flux_bound_ok << ','
       << rec.flux_split_ok << ',' << rec.ck_ok << '\n';
    r->text = os.str();
    *out = r.release();
  });
}

const char* vch_report_text(const vch_report* report) { return report ? report->text.c_str() : ""; }

int vch_report_passed(const vch_report* report) { return report && report->passed ? 1 : 0; }

vch_status vch_report_metric(const vch_report* report, const char* name, double* value) {
  if (report == nullptr || name == nullptr || value == nullptr) return fail(VCH_ERR_ARGUMENT, "null argument");
  const auto it = report->metrics.find(name);
  if (it == report->metrics.end()) return fail(VCH_ERR_ARGUMENT, std::string("no metric named ") + name);
  *value = it->second;
  return VCH_OK;
}

const char* vch_report_output_dir(const vch_report* report) { return report ? report->output_dir.c_str() : ""; }

void vch_report_free(vch_report* report) { delete report; }

vch_status vch_render_report(const char* dir, char** text) {
  if (dir == nullptr || text == nullptr) return fail(VCH_ERR_ARGUMENT, "null argument");
  *text = nullptr;
  return guarded([&] {
    const auto s = vch::render_directory(dir);
    char* buf = new char[s.size() + 1];
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *text = buf;
  });
}

vch_status vch_snapshot_header(const char* path, vch_snapshot_info* info) {
  if (path == nullptr || info == nullptr) return fail(VCH_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto h = vch::read_snapshot_header(path);
    *info = {h.version, h.dim, h.n, h.m, h.period, h.xi_max};
  });
}

void vch_string_free(char* s) { delete[] s; }

}  // extern "C"
