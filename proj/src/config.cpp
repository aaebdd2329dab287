#include "cpforce/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cpforce/error.hpp"

namespace cpforce {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& text) {
  const char* s = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    throw ConfigError(key + ": '" + text + "' is not a finite number");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + ": '" + text + "' is not an integer");
  return static_cast<int>(v);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

// One addressable config entry. `get` returns nullopt for an unset optional.
struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;
  std::string partner;  ///< mutually exclusive key, or empty
};

Field number(std::string key, double RunConfig::*m) {
  return {key, [m, key](RunConfig& c, const std::string& v) { c.*m = parse_double(key, v); },
          [m](const RunConfig& c) -> std::optional<std::string> { return fmt(c.*m); }, ""};
}

Field integer(std::string key, int RunConfig::*m) {
  return {key, [m, key](RunConfig& c, const std::string& v) { c.*m = parse_int(key, v); },
          [m](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.*m); }, ""};
}

Field text(std::string key, std::string RunConfig::*m) {
  return {key, [m](RunConfig& c, const std::string& v) { c.*m = v; },
          [m](const RunConfig& c) -> std::optional<std::string> { return c.*m; }, ""};
}

Field optional(std::string key, std::optional<double> RunConfig::*m, std::string partner) {
  return {key, [m, key](RunConfig& c, const std::string& v) { c.*m = parse_double(key, v); },
          [m](const RunConfig& c) -> std::optional<std::string> {
            if (!(c.*m)) return std::nullopt;
            return fmt(*(c.*m));
          },
          std::move(partner)};
}

void axis_fields(std::vector<Field>& out, const std::string& prefix, AxisSpec RunConfig::*m) {
  out.push_back({prefix + "_min", [m, k = prefix + "_min"](RunConfig& c, const std::string& v) { (c.*m).min = parse_double(k, v); },
                 [m](const RunConfig& c) -> std::optional<std::string> { return fmt((c.*m).min); }, ""});
  out.push_back({prefix + "_max", [m, k = prefix + "_max"](RunConfig& c, const std::string& v) { (c.*m).max = parse_double(k, v); },
                 [m](const RunConfig& c) -> std::optional<std::string> { return fmt((c.*m).max); }, ""});
  out.push_back({prefix + "_count", [m, k = prefix + "_count"](RunConfig& c, const std::string& v) { (c.*m).count = parse_int(k, v); },
                 [m](const RunConfig& c) -> std::optional<std::string> { return std::to_string((c.*m).count); }, ""});
  out.push_back({prefix + "_scale",
                 [m, k = prefix + "_scale"](RunConfig& c, const std::string& v) {
                   if (v != "log" && v != "linear") throw ConfigError(k + ": expected 'log' or 'linear', got '" + v + "'");
                   (c.*m).log = v == "log";
                 },
                 [m](const RunConfig& c) -> std::optional<std::string> { return std::string((c.*m).log ? "log" : "linear"); },
                 ""});
}

// Canonical order; to_ini writes in this order.
const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(text("medium.model", &RunConfig::medium_model));
    f.push_back(number("medium.plasma_frequency", &RunConfig::plasma_frequency));
    f.push_back(number("medium.loss_rate", &RunConfig::loss_rate));
    f.push_back(optional("emitter.wavelength", &RunConfig::wavelength, "emitter.omega0"));
    f.push_back(optional("emitter.omega0", &RunConfig::omega0, "emitter.wavelength"));
    f.push_back(optional("emitter.gamma0", &RunConfig::gamma0, "emitter.lifetime"));
    f.push_back(optional("emitter.lifetime", &RunConfig::lifetime, "emitter.gamma0"));
    f.push_back(integer("geometry.n", &RunConfig::n));
    f.push_back(optional("geometry.x0", &RunConfig::x0, "geometry.x0_k0"));
    f.push_back(optional("geometry.x0_k0", &RunConfig::x0_k0, "geometry.x0"));
    f.push_back(optional("geometry.z0", &RunConfig::z0, "geometry.z0_k0"));
    f.push_back(optional("geometry.z0_k0", &RunConfig::z0_k0, "geometry.z0"));
    f.push_back({"quadrature.rel_tol",
                 [](RunConfig& c, const std::string& v) { c.quad.rel_tol = parse_double("quadrature.rel_tol", v); },
                 [](const RunConfig& c) -> std::optional<std::string> { return fmt(c.quad.rel_tol); }, ""});
    f.push_back({"quadrature.abs_tol",
                 [](RunConfig& c, const std::string& v) { c.quad.abs_tol = parse_double("quadrature.abs_tol", v); },
                 [](const RunConfig& c) -> std::optional<std::string> { return fmt(c.quad.abs_tol); }, ""});
    f.push_back({"quadrature.cancellation_floor",
                 [](RunConfig& c, const std::string& v) {
                   c.quad.cancellation_floor = parse_double("quadrature.cancellation_floor", v);
                 },
                 [](const RunConfig& c) -> std::optional<std::string> { return fmt(c.quad.cancellation_floor); }, ""});
    f.push_back({"quadrature.max_subdivisions",
                 [](RunConfig& c, const std::string& v) {
                   const int k = parse_int("quadrature.max_subdivisions", v);
                   if (k < 1) throw ConfigError("quadrature.max_subdivisions: must be >= 1");
                   c.quad.max_subdivisions = static_cast<std::size_t>(k);
                 },
                 [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.quad.max_subdivisions); },
                 ""});
    f.push_back({"quadrature.tail_cutoff",
                 [](RunConfig& c, const std::string& v) { c.quad.tail_cutoff = parse_double("quadrature.tail_cutoff", v); },
                 [](const RunConfig& c) -> std::optional<std::string> { return fmt(c.quad.tail_cutoff); }, ""});
    f.push_back(optional("evolution.t_end", &RunConfig::t_end, "evolution.t_end_gamma0"));
    f.push_back(optional("evolution.t_end_gamma0", &RunConfig::t_end_gamma0, "evolution.t_end"));
    f.push_back(number("evolution.step_gamma0", &RunConfig::step_gamma0));
    f.push_back(integer("evolution.samples", &RunConfig::samples));
    f.push_back(text("evolution.integrator", &RunConfig::integrator));
    f.push_back(text("evolution.initial", &RunConfig::initial_state));
    axis_fields(f, "map.x0_k0", &RunConfig::map_x0);
    axis_fields(f, "map.z0_k0", &RunConfig::map_z0);
    f.push_back(integer("subradiant.n", &RunConfig::sub_n));
    f.push_back(number("subradiant.z0_k0", &RunConfig::sub_z0_k0));
    axis_fields(f, "subradiant.x0_k0", &RunConfig::sub_x0);
    f.push_back(integer("run.threads", &RunConfig::threads));
    f.push_back(text("run.out", &RunConfig::out_dir));
    return f;
  }();
  return table;
}

const Field& field(const std::string& key) {
  for (const auto& f : fields())
    if (f.key == key) return f;
  throw ConfigError("unknown config key '" + key + "'");
}

void clear(RunConfig& c, const std::string& key) {
  if (key == "emitter.wavelength") c.wavelength.reset();
  else if (key == "emitter.omega0") c.omega0.reset();
  else if (key == "emitter.gamma0") c.gamma0.reset();
  else if (key == "emitter.lifetime") c.lifetime.reset();
  else if (key == "geometry.x0") c.x0.reset();
  else if (key == "geometry.x0_k0") c.x0_k0.reset();
  else if (key == "geometry.z0") c.z0.reset();
  else if (key == "geometry.z0_k0") c.z0_k0.reset();
  else if (key == "evolution.t_end") c.t_end.reset();
  else if (key == "evolution.t_end_gamma0") c.t_end_gamma0.reset();
}

// Applies one layer of settings. A key overrides its exclusive partner from
// earlier layers; giving both in one layer is an error.
void apply_layer(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::set<std::string> seen;
  for (const auto& [k, v] : kv) {
    const Field& f = field(k);
    if (!seen.insert(k).second) throw ConfigError(k + ": given more than once");
    if (!f.partner.empty() && seen.count(f.partner))
      throw ConfigError(k + ": conflicts with " + f.partner + " (give exactly one)");
  }
  for (const auto& [k, v] : kv) {
    const Field& f = field(k);
    if (!f.partner.empty()) clear(cfg, f.partner);
    f.set(cfg, v);
  }
}

void check_pair(const std::optional<double>& a, const char* an, const std::optional<double>& b, const char* bn) {
  if (a && b) throw ConfigError(std::string(an) + ": conflicts with " + bn + " (give exactly one)");
  if (!a && !b) throw ConfigError(std::string(an) + ": missing (set " + an + " or " + bn + ")");
  const double v = a ? *a : *b;
  if (!(v > 0.0)) throw ConfigError(std::string(a ? an : bn) + ": must be positive");
}

void check_axis(const AxisSpec& a, const std::string& name) {
  if (a.count < 1) throw ConfigError(name + "_count: must be >= 1");
  if (!(a.min <= a.max)) throw ConfigError(name + "_min: must not exceed " + name + "_max");
  if (a.log && !(a.min > 0.0)) throw ConfigError(name + "_min: log axis needs a positive minimum");
  if (a.count == 1 && a.min != a.max) throw ConfigError(name + "_count: a single point needs min == max");
}

const char* kFig2Gold = R"(
[medium]
model = drude
plasma_frequency = 1.36e16
loss_rate = 1.04e14

[emitter]
wavelength = 700e-9
lifetime = 26e-9

[geometry]
n = 2
x0 = 1e-9
z0 = 10e-9

[map]
x0_k0_min = 1e-4
x0_k0_max = 10
x0_k0_count = 121
x0_k0_scale = log
z0_k0_min = 0.01
z0_k0_max = 0.01
z0_k0_count = 1

[subradiant]
n = 6
z0_k0 = 0.1
x0_k0_min = 1e-3
x0_k0_max = 1
x0_k0_count = 31
x0_k0_scale = log
)";

const char* kFig3Siv = R"(
[medium]
model = drude
plasma_frequency = 1.36e16
loss_rate = 1.04e14

[emitter]
wavelength = 737e-9
lifetime = 1.7e-9

[geometry]
n = 10
x0 = 1e-9
z0 = 10e-9

[evolution]
t_end = 1.5e-9
samples = 300
initial = excited
)";

}  // namespace

std::vector<double> AxisSpec::values() const {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) {
    if (i == 0) {
      v[i] = min;
    } else if (i == count - 1) {
      v[i] = max;
    } else {
      const double s = static_cast<double>(i) / (count - 1);
      v[i] = log ? std::exp(std::log(min) + s * (std::log(max) - std::log(min))) : min + s * (max - min);
    }
  }
  return v;
}

void RunConfig::validate() const {
  if (medium_model == "drude") {
    if (!(plasma_frequency > 0.0)) throw ConfigError("medium.plasma_frequency: must be positive for a drude medium");
    if (!(loss_rate >= 0.0)) throw ConfigError("medium.loss_rate: must be >= 0");
  } else if (medium_model != "vacuum" && medium_model != "perfect_conductor") {
    throw ConfigError("medium.model: expected drude, vacuum or perfect_conductor, got '" + medium_model + "'");
  }
  check_pair(wavelength, "emitter.wavelength", omega0, "emitter.omega0");
  check_pair(gamma0, "emitter.gamma0", lifetime, "emitter.lifetime");
  quad.validate();
  if (threads < 1) throw ConfigError("run.threads: must be >= 1");
  if (out_dir.empty()) throw ConfigError("run.out: must not be empty");
}

EmitterParams RunConfig::emitter() const {
  check_pair(wavelength, "emitter.wavelength", omega0, "emitter.omega0");
  check_pair(gamma0, "emitter.gamma0", lifetime, "emitter.lifetime");
  const double g = gamma0 ? *gamma0 : 1.0 / *lifetime;
  if (wavelength) return EmitterParams::from_wavelength(*wavelength, g);
  EmitterParams e;
  e.omega0 = *omega0;
  e.gamma0 = g;
  e.validate();
  return e;
}

Medium RunConfig::medium() const {
  validate();
  if (medium_model == "vacuum") return Medium::vacuum();
  if (medium_model == "perfect_conductor") return Medium::perfect_conductor();
  return Medium::drude(plasma_frequency, loss_rate).scaled(emitter().omega0);
}

Geometry RunConfig::geometry() const {
  if (n < 1 || n > kMaxEmitters)
    throw ConfigError("geometry.n: must be in [1, " + std::to_string(kMaxEmitters) + "], got " + std::to_string(n));
  check_pair(x0, "geometry.x0", x0_k0, "geometry.x0_k0");
  check_pair(z0, "geometry.z0", z0_k0, "geometry.z0_k0");
  const double k0 = emitter().k0();
  Geometry g{n, x0 ? *x0 * k0 : *x0_k0, z0 ? *z0 * k0 : *z0_k0};
  g.validate();
  return g;
}

EvolutionSpec RunConfig::evolution() const {
  check_pair(t_end, "evolution.t_end", t_end_gamma0, "evolution.t_end_gamma0");
  if (!(step_gamma0 >= 0.0)) throw ConfigError("evolution.step_gamma0: must be >= 0 (0 selects the default)");
  if (samples < 1) throw ConfigError("evolution.samples: must be >= 1");
  EvolutionSpec s;
  s.t_end = t_end ? *t_end * emitter().gamma0 : *t_end_gamma0;
  s.step = step_gamma0;
  s.samples = samples;
  if (integrator == "exponential") s.integrator = Integrator::exponential;
  else if (integrator == "rk4") s.integrator = Integrator::rk4;
  else throw ConfigError("evolution.integrator: expected exponential or rk4, got '" + integrator + "'");
  return s;
}

QuantumState RunConfig::initial() const {
  const Geometry g = geometry();
  if (initial_state == "excited") return excited_state(g.n);
  if (initial_state == "ground") return ground_state(g.n);
  if (initial_state == "dicke_m0") {
    if (g.n % 2 != 0) throw ConfigError("evolution.initial: dicke_m0 needs an even geometry.n");
    return dicke_state(g.n, g.n / 2, 0);
  }
  throw ConfigError("evolution.initial: expected excited, ground or dicke_m0, got '" + initial_state + "'");
}

MapGrid RunConfig::map_grid() const {
  check_axis(map_x0, "map.x0_k0");
  check_axis(map_z0, "map.z0_k0");
  MapGrid g{map_x0.values(), map_z0.values()};
  g.validate();
  return g;
}

std::vector<double> RunConfig::subradiant_x0() const {
  if (sub_n < 2 || sub_n > kMaxEmitters || sub_n % 2 != 0)
    throw ConfigError("subradiant.n: must be even and in [2, " + std::to_string(kMaxEmitters) + "]");
  if (!(sub_z0_k0 > 0.0)) throw ConfigError("subradiant.z0_k0: must be positive");
  check_axis(sub_x0, "subradiant.x0_k0");
  if (!(sub_x0.min > 0.0)) throw ConfigError("subradiant.x0_k0_min: must be positive");
  return sub_x0.values();
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  if (name == "fig2-gold") load_ini_string(c, kFig2Gold);
  else if (name == "fig3-siv") load_ini_string(c, kFig3Siv);
  else throw ConfigError("unknown preset '" + name + "' (known: fig2-gold, fig3-siv)");
  return c;
}

std::vector<std::string> preset_names() { return {"fig2-gold", "fig3-siv"}; }

void apply_setting(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  apply_layer(cfg, {{trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1))}});
}

void load_ini_string(RunConfig& cfg, const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config parse error: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  std::vector<std::pair<std::string, std::string>> kv;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config key '" + section + "' must sit inside a [section]");
    for (const auto& [key, value] : body) kv.emplace_back(section + "." + key, trim(value.data()));
  }
  apply_layer(cfg, kv);
}

void load_ini(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  load_ini_string(cfg, buf.str());
}

std::string to_ini(const RunConfig& cfg) {
  std::string out, section;
  for (const auto& f : fields()) {
    const auto v = f.get(cfg);
    if (!v) continue;
    const auto dot = f.key.find('.');
    const std::string s = f.key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out += "\n";
      out += "[" + s + "]\n";
      section = s;
    }
    out += f.key.substr(dot + 1) + " = " + *v + "\n";
  }
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  // Execution settings do not change results.
  RunConfig c = cfg;
  c.threads = RunConfig{}.threads;
  c.out_dir = RunConfig{}.out_dir;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_ini(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cpforce
