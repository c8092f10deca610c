#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vch/errors.hpp"
#include "vch/harness.hpp"

namespace vch {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

[[noreturn]] void bad(const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what); }

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out)) bad(key, "expected a number, got '" + v + "'");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) bad(key, "expected an integer, got '" + v + "'");
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  const auto x = parse_int(key, v);
  if (x <= 0) bad(key, "must be a positive integer");
  return static_cast<std::size_t>(x);
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(parse_double(key, tok));
  if (out.empty()) bad(key, "empty list");
  return out;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

double RunConfig::resolved_xi_max() const { return xi_max.value_or(6.0 * std::sqrt(D)); }
double RunConfig::resolved_sigma() const { return sigma_S.value_or(L / 32.0); }
double RunConfig::resolved_radius() const { return support_R.value_or(L / 8.0); }

void apply_config_entry(RunConfig& c, const std::string& section, const std::string& key, const std::string& value) {
  const std::string k = section + "." + key;
  if (k == "grid.dim") {
    c.dim = static_cast<int>(parse_int(k, value));
  } else if (k == "grid.n") {
    c.n = parse_count(k, value);
  } else if (k == "grid.m") {
    c.m = parse_count(k, value);
  } else if (k == "grid.L") {
    c.L = parse_double(k, value);
  } else if (k == "grid.xi_max") {
    c.xi_max = parse_double(k, value);
  } else if (k == "physics.D") {
    c.D = parse_double(k, value);
  } else if (k == "physics.sigma_S") {
    c.sigma_S = parse_double(k, value);
  } else if (k == "physics.support_R") {
    c.support_R = parse_double(k, value);
  } else if (k == "sweep.eps_list") {
    c.eps_list = parse_list(k, value);
  } else if (k == "sweep.alpha") {
    if (value == "eps" || value.empty()) {
      c.alpha.reset();
    } else {
      c.alpha = parse_double(k, value);
    }
  } else if (k == "sweep.T_final") {
    c.T_final = parse_double(k, value);
  } else if (k == "sweep.checkpoints") {
    c.checkpoints = parse_count(k, value);
  } else if (k == "time.cfl") {
    c.cfl = parse_double(k, value);
  } else if (k == "time.dt_relax_ratio") {
    c.dt_relax_ratio = parse_double(k, value);
  } else if (k == "time.macro_dt") {
    c.macro_dt = parse_double(k, value);
  } else if (k == "initial.preset") {
    if (value == "uniform") {
      c.initial.preset = Preset::uniform;
    } else if (value == "single-mode") {
      c.initial.preset = Preset::single_mode;
    } else if (value == "two-bump") {
      c.initial.preset = Preset::two_bump;
    } else if (value == "random") {
      c.initial.preset = Preset::random;
    } else {
      bad(k, "unknown preset '" + value + "' (uniform, single-mode, two-bump, random)");
    }
  } else if (k == "initial.amplitude") {
    c.initial.amplitude = parse_double(k, value);
  } else if (k == "initial.mode") {
    c.initial.mode = static_cast<int>(parse_int(k, value));
  } else if (k == "initial.rho_bar") {
    c.initial.rho_bar = parse_double(k, value);
  } else if (k == "initial.seed") {
    const auto s = parse_int(k, value);
    if (s < 0) bad(k, "must be nonnegative");
    c.initial.seed = static_cast<std::uint64_t>(s);
  } else if (k == "numerics.x_transport") {
    if (value == "spectral") {
      c.x_transport = XTransport::spectral;
    } else if (value == "semi-lagrangian") {
      c.x_transport = XTransport::semi_lagrangian;
    } else {
      bad(k, "unknown value '" + value + "' (spectral, semi-lagrangian)");
    }
  } else if (k == "numerics.xi_flux") {
    if (value == "upwind") {
      c.xi_flux = XiFlux::upwind;
    } else if (value == "logmean") {
      c.xi_flux = XiFlux::logmean;
    } else {
      bad(k, "unknown value '" + value + "' (upwind, logmean)");
    }
  } else if (k == "output.dir") {
    c.out_dir = value;
  } else if (k == "output.run_id") {
    if (value.empty() || value.find('/') != std::string::npos) bad(k, "must be a plain directory name");
    c.run_id = value;
  } else {
    throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
  }
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of a section");
    try {
      apply_config_entry(cfg, section, trim(std::string_view(line).substr(0, eq)),
                         trim(std::string_view(line).substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path.string());
}

void RunConfig::validate() const {
  if (dim != 1 && dim != 2) bad("grid.dim", "must be 1 or 2");
  if (n < 4 || !is_power_of_two(n)) bad("grid.n", "must be a power of two >= 4");
  if (m < 2 || m % 2 != 0) bad("grid.m", "must be even and >= 2");
  if (!(L > 0.0)) bad("grid.L", "must be positive");
  if (!(D > 0.0)) bad("physics.D", "must be positive");
  if (resolved_xi_max() < 6.0 * std::sqrt(D) * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "must be at least 6 sqrt(D) = " << 6.0 * std::sqrt(D);
    bad("grid.xi_max", os.str());
  }
  const SpatialGrid sg(dim, n, L);
  try {
    (void)make_short_kernel(sg, resolved_sigma());
  } catch (const Error& e) {
    bad("physics.sigma_S", e.what());
  }
  LongRangeKernel kl;
  try {
    kl = make_long_kernel(sg, resolved_radius());
  } catch (const Error& e) {
    bad("physics.support_R", e.what());
  }
  if (eps_list.empty()) bad("sweep.eps_list", "must not be empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) bad("sweep.eps_list", "entries must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) bad("sweep.eps_list", "must be strictly decreasing");
  }
  if (alpha && !(*alpha > 0.0)) bad("sweep.alpha", "must be positive");
  try {
    kl.check_scale(alpha_for(eps_list.front()));
  } catch (const Error& e) {
    bad(alpha ? "sweep.alpha" : "sweep.eps_list", e.what());
  }
  if (!(T_final > 0.0)) bad("sweep.T_final", "must be positive");
  if (checkpoints < 2) bad("sweep.checkpoints", "must be at least 2");
  if (!(cfl > 0.0) || cfl > 1.0) bad("time.cfl", "must lie in (0, 1]");
  if (!(dt_relax_ratio > 0.0)) bad("time.dt_relax_ratio", "must be positive");
  if (!(macro_dt > 0.0)) bad("time.macro_dt", "must be positive");
  if (!(initial.rho_bar > 0.0)) bad("initial.rho_bar", "must be positive");
  if (!(initial.amplitude >= 0.0) || initial.amplitude >= 1.0) bad("initial.amplitude", "must lie in [0, 1)");
  if (initial.mode < 1 || static_cast<std::size_t>(initial.mode) >= n / 2) bad("initial.mode", "must lie in [1, n/2)");
  if (out_dir.empty()) bad("output.dir", "must not be empty");
}

}  // namespace vch
