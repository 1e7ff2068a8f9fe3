#include "glv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "glv/errors.hpp"

namespace glv {

namespace {

struct Pos {
  int line = 0;
  int col = 0;
};

std::string trim(const std::string& s, std::size_t* lead = nullptr) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    if (lead) *lead = s.size();
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  if (lead) *lead = b;
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, Pos p) {
  double x = 0.0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto [ptr, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || ptr != e || !std::isfinite(x))
    throw ConfigError("expected a number, got '" + v + "'", p.line, p.col);
  return x;
}

long long to_int(const std::string& v, Pos p) {
  long long x = 0;
  const char* b = v.data();
  const char* e = b + v.size();
  auto [ptr, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || ptr != e) throw ConfigError("expected an integer, got '" + v + "'", p.line, p.col);
  return x;
}

std::size_t to_count(const std::string& v, Pos p) {
  const long long x = to_int(v, p);
  if (x < 0) throw ConfigError("expected a non-negative integer, got '" + v + "'", p.line, p.col);
  return std::size_t(x);
}

bool to_bool(const std::string& v, Pos p) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean, got '" + v + "'", p.line, p.col);
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(v);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!v.empty() && v.back() == sep) out.push_back({});
  return out;
}

std::vector<double> to_doubles(const std::string& v, Pos p) {
  std::vector<double> out;
  for (const auto& s : split(v, ',')) out.push_back(to_double(s, p));
  if (out.empty()) throw ConfigError("empty list", p.line, p.col);
  return out;
}

std::vector<int> to_ints(const std::string& v, Pos p) {
  std::vector<int> out;
  for (const auto& s : split(v, ',')) out.push_back(int(to_int(s, p)));
  if (out.empty()) throw ConfigError("empty list", p.line, p.col);
  return out;
}

std::vector<Point2> to_points(const std::string& v, Pos p) {
  std::vector<Point2> out;
  for (const auto& s : split(v, ';')) {
    std::istringstream is(s);
    std::string a, b, extra;
    if (!(is >> a >> b) || (is >> extra)) throw ConfigError("expected 'x y' in '" + s + "'", p.line, p.col);
    out.push_back({to_double(a, p), to_double(b, p)});
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, Pos)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = {
      {"run.experiment", [](RunConfig& c, const std::string& v, Pos) { c.experiment = v; }},
      {"run.out", [](RunConfig& c, const std::string& v, Pos) { c.out_dir = v; }},
      {"run.seed", [](RunConfig& c, const std::string& v, Pos p) { c.seed = to_count(v, p); }},
      {"run.tol", [](RunConfig& c, const std::string& v, Pos p) { c.tol = to_double(v, p); }},
      {"model.eps", [](RunConfig& c, const std::string& v, Pos p) { c.eps = to_doubles(v, p); }},
      {"grid.n", [](RunConfig& c, const std::string& v, Pos p) { c.n = to_count(v, p); }},
      {"grid.half_width", [](RunConfig& c, const std::string& v, Pos p) { c.half_width = to_double(v, p); }},
      {"grid.radius", [](RunConfig& c, const std::string& v, Pos p) { c.radius = to_double(v, p); }},
      {"grid.nt", [](RunConfig& c, const std::string& v, Pos p) { c.nt = to_count(v, p); }},
      {"vortex.degrees", [](RunConfig& c, const std::string& v, Pos p) { c.degrees = to_ints(v, p); }},
      {"vortex.separation_exponent",
       [](RunConfig& c, const std::string& v, Pos p) {
         const double s = to_double(v, p);
         if (!(s >= 0.0 && s < 1.0)) throw ConfigError("separation_exponent out of [0,1)", p.line, p.col);
         c.separation_exponent = s;
       }},
      {"vortex.centers", [](RunConfig& c, const std::string& v, Pos p) { c.centers = to_points(v, p); }},
      {"vortex.jitter", [](RunConfig& c, const std::string& v, Pos p) { c.jitter = to_double(v, p); }},
      {"vortex.min_separation",
       [](RunConfig& c, const std::string& v, Pos p) { c.min_separation = to_double(v, p); }},
      {"solver.dt_factor", [](RunConfig& c, const std::string& v, Pos p) { c.solver.dt_factor = to_double(v, p); }},
      {"solver.max_steps", [](RunConfig& c, const std::string& v, Pos p) { c.solver.max_steps = int(to_int(v, p)); }},
      {"solver.residual_tol", [](RunConfig& c, const std::string& v, Pos p) { c.solver.residual_tol = to_double(v, p); }},
      {"solver.newton", [](RunConfig& c, const std::string& v, Pos p) { c.solver.newton = to_bool(v, p); }},
      {"solver.newton_switch", [](RunConfig& c, const std::string& v, Pos p) { c.solver.newton_switch = to_double(v, p); }},
      {"solver.max_newton", [](RunConfig& c, const std::string& v, Pos p) { c.solver.max_newton = int(to_int(v, p)); }},
      {"solver.explicit", [](RunConfig& c, const std::string& v, Pos p) { c.solver.explicit_flow = to_bool(v, p); }},
      {"sweep.kappa", [](RunConfig& c, const std::string& v, Pos p) { c.sweep_kappa = int(to_int(v, p)); }},
      {"sweep.taus", [](RunConfig& c, const std::string& v, Pos p) { c.taus = to_doubles(v, p); }},
      {"sweep.s0", [](RunConfig& c, const std::string& v, Pos p) { c.s0 = to_double(v, p); }},
      {"helix.kappa", [](RunConfig& c, const std::string& v, Pos p) { c.helix_kappa = int(to_int(v, p)); }},
      {"helix.tau", [](RunConfig& c, const std::string& v, Pos p) { c.helix_tau = to_double(v, p); }},
      {"helix.delta", [](RunConfig& c, const std::string& v, Pos p) { c.helix_delta = to_double(v, p); }},
      {"helix.radius_coefficient",
       [](RunConfig& c, const std::string& v, Pos p) { c.helix_radius_coefficient = to_double(v, p); }},
      {"audit.radii", [](RunConfig& c, const std::string& v, Pos p) { c.radii = to_doubles(v, p); }},
      {"audit.s", [](RunConfig& c, const std::string& v, Pos p) { c.annulus_s = to_double(v, p); }},
      {"audit.eta", [](RunConfig& c, const std::string& v, Pos p) { c.eta = to_double(v, p); }},
      {"audit.tau0", [](RunConfig& c, const std::string& v, Pos p) { c.tau0 = to_double(v, p); }},
      {"audit.delta", [](RunConfig& c, const std::string& v, Pos p) { c.w_delta = to_double(v, p); }},
      {"audit.field", [](RunConfig& c, const std::string& v, Pos) { c.field = v; }},
  };
  return m;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "profile", "ansatz",     "solve",    "analyze", "identity", "sweep",
      "annulus", "monotonicity", "wdrop", "pohozaev", "clearing", "helix"};
  return names;
}

void RunConfig::validate() const {
  const auto& names = experiment_names();
  if (experiment.empty()) throw ConfigError("missing [run] experiment");
  if (std::find(names.begin(), names.end(), experiment) == names.end())
    throw ConfigError("unknown experiment '" + experiment + "'");
  if (eps.empty()) throw ConfigError("missing eps");
  for (double e : eps)
    if (!(e > 0.0 && e < 0.5)) throw ConfigError("eps out of (0, 1/2)");
  if (separation_exponent && !(*separation_exponent >= 0.0 && *separation_exponent < 1.0))
    throw ConfigError("separation_exponent out of [0,1)");
  if (n != 0 && n < 8) throw ConfigError("grid n must be 0 or at least 8");
  if (!(half_width > 0.0)) throw ConfigError("grid half_width must be positive");
  if (!(radius >= 0.0)) throw ConfigError("grid radius must be non-negative");
  if (nt < 8) throw ConfigError("grid nt must be at least 8");
  for (int d : degrees)
    if (d == 0) throw ConfigError("vortex degrees must be nonzero");
  if (!centers.empty() && centers.size() != degrees.size())
    throw ConfigError("centers and degrees differ in length");
  if (!(jitter >= 0.0)) throw ConfigError("jitter must be non-negative");
  if (!(min_separation > 0.0)) throw ConfigError("min_separation must be positive");
  if (!(tol >= 0.0)) throw ConfigError("tol must be non-negative");
  for (double t : taus)
    if (!(t >= 0.0 && t < 1.0)) throw ConfigError("tau out of [0,1)");
  if (!(helix_tau >= 0.0 && helix_tau < 1.0)) throw ConfigError("helix tau out of [0,1)");
  try {
    solver.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config(const std::string& text, bool strict, std::vector<std::string>* warnings) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    // '#' starts a comment anywhere, ';' only at the start of a line since
    // center lists use it as a separator
    std::string s = raw.substr(0, raw.find('#'));
    if (const auto f = s.find_first_not_of(" \t"); f != std::string::npos && s[f] == ';') s.clear();
    std::size_t lead = 0;
    const std::string t = trim(s, &lead);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("unterminated section header", line, int(lead + t.size()));
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line, int(lead + 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line, int(lead + 1));
    std::size_t klead = 0, vlead = 0;
    const std::string key = trim(s.substr(0, eq), &klead);
    const std::string value = trim(s.substr(eq + 1), &vlead);
    if (key.empty()) throw ConfigError("missing key before '='", line, int(eq + 1));
    const Pos kpos{line, int(klead + 1)};
    const Pos vpos{line, int(eq + 2 + vlead)};
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", line, int(eq + 2));
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) {
      if (strict) throw ConfigError("unknown key '" + full + "'", kpos.line, kpos.col);
      if (warnings)
        warnings->push_back("unknown key '" + full + "' at line " + std::to_string(line) +
                            ", ignored");
      continue;
    }
    it->second(cfg, value, vpos);
    cfg.echo.emplace_back(full, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, bool strict,
                      std::vector<std::string>* warnings) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), strict, warnings);
}

}  // namespace glv
