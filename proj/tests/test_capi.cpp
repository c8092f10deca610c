#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <string>

#include "doctest.h"
#include "vch/vch.h"

namespace fs = std::filesystem;

namespace {

vch_config* small_config() {
  vch_config* cfg = nullptr;
  REQUIRE(vch_config_default(&cfg) == VCH_OK);
  const char* entries[][3] = {{"grid", "n", "32"},       {"grid", "m", "32"},
                              {"sweep", "T_final", "0.02"}, {"sweep", "checkpoints", "3"},
                              {"sweep", "eps_list", "0.4, 0.2, 0.1"}, {"output", "run_id", "capi"}};
  for (const auto& e : entries) REQUIRE(vch_config_set(cfg, e[0], e[1], e[2]) == VCH_OK);
  return cfg;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(vch_version()).size() > 0);
  CHECK(std::string(vch_status_name(VCH_OK)) == "ok");
  CHECK(std::string(vch_status_name(VCH_ERR_IO)) != std::string(vch_status_name(VCH_ERR_RUNTIME)));
}

TEST_CASE("argument and validation errors") {
  CHECK(vch_config_default(nullptr) == VCH_ERR_ARGUMENT);
  CHECK(std::string(vch_last_error()).size() > 0);
  vch_config* cfg = nullptr;
  CHECK(vch_config_load("/nonexistent/file.cfg", &cfg) == VCH_ERR_VALIDATION);
  CHECK(cfg == nullptr);
  REQUIRE(vch_config_default(&cfg) == VCH_OK);
  CHECK(vch_config_set(cfg, "grid", "bogus", "1") == VCH_ERR_VALIDATION);
  CHECK(std::string(vch_last_error()).find("bogus") != std::string::npos);
  CHECK(vch_config_set(cfg, "grid", "n", nullptr) == VCH_ERR_ARGUMENT);
  REQUIRE(vch_config_set(cfg, "physics", "sigma_S", "0.5") == VCH_OK);
  CHECK(vch_config_validate(cfg) == VCH_ERR_VALIDATION);
  CHECK(std::string(vch_last_error()).find("physics.sigma_S") != std::string::npos);
  vch_report* rep = nullptr;
  CHECK(vch_run_kinetic(cfg, 0.0, nullptr, &rep) == VCH_ERR_VALIDATION);
  CHECK(rep == nullptr);
  vch_config_free(cfg);
  vch_config_free(nullptr);
}

TEST_CASE("kinetic run, snapshot check and report") {
  const fs::path dir = fs::temp_directory_path() / "vch_capi_test";
  fs::remove_all(dir);
  vch_config* cfg = small_config();
  vch_report* rep = nullptr;
  REQUIRE(vch_run_kinetic(cfg, 0.2, dir.c_str(), &rep) == VCH_OK);
  double eps = 0.0, steps = 0.0, mass = 0.0;
  CHECK(vch_report_metric(rep, "eps", &eps) == VCH_OK);
  CHECK(eps == 0.2);
  CHECK(vch_report_metric(rep, "steps", &steps) == VCH_OK);
  CHECK(steps > 0.0);
  CHECK(vch_report_metric(rep, "final.mass", &mass) == VCH_OK);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(vch_report_metric(rep, "no_such_metric", &mass) == VCH_ERR_ARGUMENT);
  CHECK(vch_report_passed(rep) == 1);
  CHECK(std::string(vch_report_text(rep)).size() > 0);
  const fs::path out = vch_report_output_dir(rep);
  CHECK(out == dir / "capi");
  vch_report_free(rep);

  const auto snap = (out / "snapshots" / "f_002.vchf").string();
  vch_snapshot_info info{};
  REQUIRE(vch_snapshot_header(snap.c_str(), &info) == VCH_OK);
  CHECK(info.n == 32);
  CHECK(info.m == 32);
  CHECK(info.dim == 1);

  REQUIRE(vch_check_snapshot(nullptr, snap.c_str(), 0.2, &rep) == VCH_OK);
  double checked = 0.0;
  CHECK(vch_report_metric(rep, "mass", &checked) == VCH_OK);
  CHECK(checked == doctest::Approx(1.0).epsilon(1e-12));
  vch_report_free(rep);

  char* text = nullptr;
  REQUIRE(vch_render_report(out.c_str(), &text) == VCH_OK);
  CHECK(std::string(text).size() > 0);
  vch_string_free(text);

  CHECK(vch_snapshot_header((dir / "missing.vchf").c_str(), &info) == VCH_ERR_IO);
  CHECK(vch_check_snapshot(cfg, (dir / "missing.vchf").c_str(), 0.2, &rep) == VCH_ERR_IO);
  vch_config_free(cfg);
  fs::remove_all(dir);
}

TEST_CASE("macro run without output") {
  vch_config* cfg = small_config();
  vch_report* rep = nullptr;
  REQUIRE(vch_run_macro(cfg, nullptr, &rep) == VCH_OK);
  double a = 0.0, b = 0.0;
  REQUIRE(vch_report_metric(rep, "initial.mass", &a) == VCH_OK);
  REQUIRE(vch_report_metric(rep, "final.mass", &b) == VCH_OK);
  CHECK(b == doctest::Approx(a).epsilon(1e-13));
  CHECK(std::string(vch_report_output_dir(rep)).empty());
  vch_report_free(rep);
  vch_config_free(cfg);
}
