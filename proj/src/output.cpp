#include "cpforce/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cpforce/error.hpp"

namespace cpforce {

namespace {

using json = nlohmann::ordered_json;

std::string g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string preamble(const std::string& hash, const char* schema, const std::vector<const char*>& cols) {
  std::string out = "# config_hash=" + hash + " schema=" + schema + "\n";
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + std::string(cols[i]);
  return out + "\n";
}

void row(std::string& out, const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += g9(v[i]);
  }
  out += '\n';
}

json matrix(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json line = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) line.push_back(m(r, c));
    a.push_back(line);
  }
  return a;
}

}  // namespace

std::string force_map_csv(const ForceMap& map, const std::string& hash) {
  std::string out = preamble(hash, kForceMapSchema,
                             {"x0_k0", "z0_k0", "F_g", "F_e", "F_sup", "F_sub", "F_inf", "Gam_sup", "Gam_sub",
                              "Gam_nn", "quad_err_flag"});
  for (const MapCell& c : map.cells) {
    const auto& f = c.forces;
    row(out, {c.x0, c.z0, f.F_g, f.F_e, f.F_sup, f.F_sub, f.F_inf, f.gamma_sup, f.gamma_sub, f.gamma_nn,
              c.failed ? 1.0 : 0.0});
  }
  return out;
}

std::string force_series_csv(const ForceSeries& s, const EmitterParams& emitter, const std::string& hash) {
  std::string out = preamble(hash, kForceSeriesSchema,
                             {"t_s", "t_gamma0", "F_total_natural", "F_total_N", "boost_N", "excitation", "trace_err"});
  const double unit = emitter.force_unit();
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    const double boost = s.reference.empty() ? 0.0 : s.force[i] - s.reference[i];
    row(out, {s.t[i] / emitter.gamma0, s.t[i], s.force[i], s.force[i] * unit, boost * unit, s.excitation[i],
              s.trace_err[i]});
  }
  return out;
}

std::string subradiant_csv(const std::vector<SubradiantRow>& rows, const std::string& hash) {
  const std::size_t d = rows.empty() ? 0 : rows.front().forces.size();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < d; ++i) names.push_back("F_sr_" + std::to_string(i + 1));
  std::vector<const char*> cols{"x0_k0", "z0_k0", "F_g", "F_e"};
  for (const auto& n : names) cols.push_back(n.c_str());
  std::string out = preamble(hash, kSubradiantSchema, cols);
  for (const auto& r : rows) {
    std::vector<double> v{r.x0, r.z0, r.F_g, r.F_e};
    v.insert(v.end(), r.forces.begin(), r.forces.end());
    row(out, v);
  }
  return out;
}

std::string couplings_json(const CouplingSet& c, const EmitterParams& emitter, const std::string& hash) {
  json j;
  j["config_hash"] = hash;
  j["units"] = {{"length", "1/k0"}, {"rate", "Gamma0"}, {"derivative", "Gamma0 k0"}};
  j["emitter"] = {{"omega0_rad_s", emitter.omega0},
                  {"gamma0_per_s", emitter.gamma0},
                  {"wavelength_m", emitter.wavelength()},
                  {"k0_per_m", emitter.k0()},
                  {"force_unit_N", emitter.force_unit()}};
  j["geometry"] = {{"n", c.geometry.n}, {"x0_k0", c.geometry.x0}, {"z0_k0", c.geometry.z0}};
  j["omega_plus"] = c.omega_plus;
  j["omega_minus"] = c.omega_minus;
  j["omega_res"] = c.omega_res;
  j["d_omega_plus"] = c.d_omega_plus;
  j["d_omega_minus"] = c.d_omega_minus;
  j["d_omega_res"] = c.d_omega_res;
  j["omega_free"] = matrix(c.omega_free);
  j["omega_sc"] = matrix(c.omega_sc);
  j["gamma_free"] = matrix(c.gamma_free);
  j["gamma_sc"] = matrix(c.gamma_sc);
  j["d_omega_sc"] = matrix(c.d_omega_sc);
  j["d_gamma_sc"] = matrix(c.d_gamma_sc);
  j["gamma_eigenvalue_min"] = c.min_gamma_eigenvalue();
  j["gamma_eigenvalue_max"] = c.max_gamma_eigenvalue();
  j["quadrature"] = {{"max_error_estimate", c.max_quadrature_error}};
  return j.dump(2) + "\n";
}

std::string sidecar_json(const std::string& command, const std::string& hash, const std::string& ini,
                         const std::string& summary_json) {
  json j;
  j["config_hash"] = hash;
  j["command"] = command;
  j["config"] = ini;
  j["summary"] = json::parse(summary_json);
  return j.dump(2) + "\n";
}

std::string failures_json(const ForceMap& map, const std::string& hash) {
  json j;
  j["config_hash"] = hash;
  j["failures"] = json::array();
  for (const auto& f : map.failures)
    j["failures"].push_back({{"index", f.index}, {"x0_k0", f.x0}, {"z0_k0", f.z0}, {"message", f.message}});
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace cpforce
