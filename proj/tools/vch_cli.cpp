#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "vch/vch.h"

namespace {

int exit_code(vch_status s) {
  switch (s) {
    case VCH_OK:
      return 0;
    case VCH_ERR_VALIDATION:
    case VCH_ERR_ARGUMENT:
      return 1;
    default:
      return 2;
  }
}

int report_error(vch_status s, const CLI::App& app, bool usage) {
  std::fprintf(stderr, "vch: %s: %s\n", vch_status_name(s), vch_last_error());
  if (usage) std::fprintf(stderr, "\n%s", app.help().c_str());
  return exit_code(s);
}

struct Options {
  std::string config;
  std::string out;
  std::string in;
  double eps = 0.0;
  bool quiet = false;
};

int finish(vch_report* report, bool quiet) {
  if (!quiet) {
    std::fputs(vch_report_text(report), stdout);
    const char* dir = vch_report_output_dir(report);
    if (*dir) std::printf("output: %s\n", dir);
  }
  vch_report_free(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic Vlasov / nonlocal Cahn-Hilliard simulator"};
  app.require_subcommand(1);
  Options opt;

  auto* kinetic = app.add_subcommand("run-kinetic", "Run the kinetic solver for one eps");
  auto* macro = app.add_subcommand("run-macro", "Run the limit Cahn-Hilliard solver");
  auto* sweep = app.add_subcommand("sweep", "Run the eps sweep against the limit solver");
  auto* check = app.add_subcommand("check", "Re-evaluate diagnostics on a stored snapshot");
  auto* report = app.add_subcommand("report", "Summarize the CSV output of a run directory");

  for (auto* sub : {kinetic, macro, sweep}) {
    sub->add_option("--config", opt.config, "Config file")->required();
    sub->add_option("--out", opt.out, "Output directory (overrides [output] dir)");
    sub->add_flag("--quiet", opt.quiet, "Print nothing on success");
  }
  kinetic->add_option("--eps", opt.eps, "Scale parameter (default: first entry of eps_list)");
  check->add_option("--config", opt.config, "Config file (default: snapshot grid with default physics)");
  check->add_option("--in", opt.in, "Phase-space snapshot")->required();
  check->add_option("--eps", opt.eps, "Scale parameter (default: first entry of eps_list)");
  check->add_flag("--quiet", opt.quiet, "Print nothing on success");
  report->add_option("--in", opt.in, "Run directory")->required();
  report->add_flag("--quiet", opt.quiet, "Print nothing on success");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "vch: %s\n\n%s", e.what(), app.help().c_str());
    return 1;
  }

  if (report->parsed()) {
    char* text = nullptr;
    const auto s = vch_render_report(opt.in.c_str(), &text);
    if (s != VCH_OK) return report_error(s, app, false);
    if (!opt.quiet) std::fputs(text, stdout);
    vch_string_free(text);
    return 0;
  }

  vch_config* cfg = nullptr;
  if (!opt.config.empty()) {
    const auto s = vch_config_load(opt.config.c_str(), &cfg);
    if (s != VCH_OK) return report_error(s, app, true);
  }

  vch_report* out = nullptr;
  vch_status s = VCH_OK;
  const char* out_dir = opt.out.c_str();
  if (kinetic->parsed()) {
    s = vch_run_kinetic(cfg, opt.eps, out_dir, &out);
  } else if (macro->parsed()) {
    s = vch_run_macro(cfg, out_dir, &out);
  } else if (sweep->parsed()) {
    s = vch_run_sweep(cfg, out_dir, &out);
  } else if (check->parsed()) {
    s = vch_check_snapshot(cfg, opt.in.c_str(), opt.eps, &out);
  }
  vch_config_free(cfg);
  if (s != VCH_OK) return report_error(s, app, false);
  return finish(out, opt.quiet);
}
