#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpforce/config.hpp"
#include "cpforce/error.hpp"
#include "cpforce/output.hpp"

namespace {

using namespace cpforce;
using json = nlohmann::ordered_json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  std::vector<std::string> settings;
  int threads = 0;
};

RunConfig resolve(const Options& o) {
  RunConfig cfg = o.preset_name.empty() ? RunConfig{} : preset(o.preset_name);
  if (!o.config_path.empty()) load_ini(cfg, o.config_path);
  for (const auto& s : o.settings) apply_setting(cfg, s);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.threads != 0) cfg.threads = o.threads;
  cfg.validate();
  return cfg;
}

std::string path_in(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void report(const std::string& path) { std::fprintf(stderr, "wrote %s\n", path.c_str()); }

int run_coeffs(const RunConfig& cfg) {
  const std::string hash = config_hash(cfg);
  const EmitterParams em = cfg.emitter();
  const CouplingSet c = build_couplings(cfg.geometry(), cfg.medium(), em, cfg.quad);
  const std::string out = path_in(cfg, "coeffs.json");
  write_file(out, couplings_json(c, em, hash));
  report(out);
  const std::string side = path_in(cfg, "coeffs.config.json");
  write_file(side, sidecar_json("coeffs", hash, to_ini(cfg)));
  report(side);
  return 0;
}

int run_map(const RunConfig& cfg) {
  const std::string hash = config_hash(cfg);
  const ForceMap map = force_map(cfg.map_grid(), cfg.medium(), cfg.emitter(), cfg.quad, cfg.threads);
  const std::string out = path_in(cfg, "force_map.csv");
  write_file(out, force_map_csv(map, hash));
  report(out);
  json summary{{"cells", map.cells.size()}, {"failed_cells", map.failures.size()}};
  const std::string side = path_in(cfg, "force_map.config.json");
  write_file(side, sidecar_json("map", hash, to_ini(cfg), summary.dump()));
  report(side);
  if (!map.failures.empty()) {
    const std::string fail = path_in(cfg, "force_map.failures.json");
    write_file(fail, failures_json(map, hash));
    std::fprintf(stderr, "%zu of %zu cells failed; see %s\n", map.failures.size(), map.cells.size(), fail.c_str());
    if (map.failures.size() == map.cells.size()) return kExitNumerical;
  }
  return 0;
}

int run_dynamics(const RunConfig& cfg) {
  const std::string hash = config_hash(cfg);
  const EmitterParams em = cfg.emitter();
  const EvolutionSpec spec = cfg.evolution();
  const QuantumState rho0 = cfg.initial();
  const CouplingSet c = build_couplings(cfg.geometry(), cfg.medium(), em, cfg.quad);
  const ForceSeries s = boost_series(rho0, c, spec);
  const std::string out = path_in(cfg, "force_series.csv");
  write_file(out, force_series_csv(s, em, hash));
  report(out);
  const std::size_t p = s.peak_index();
  const double unit = em.force_unit();
  json summary{{"step_gamma0", s.step},
               {"peak_boost_N", (s.force[p] - s.reference[p]) * unit},
               {"peak_time_s", s.t[p] / em.gamma0},
               {"max_trace_err", s.max_trace_err()},
               {"max_hermiticity_err", s.max_hermiticity_err()},
               {"min_eigenvalue", s.min_min_eigenvalue()}};
  const std::string side = path_in(cfg, "force_series.config.json");
  write_file(side, sidecar_json("dynamics", hash, to_ini(cfg), summary.dump()));
  report(side);
  std::fprintf(stderr, "peak boost %.4g N at %.4g s\n", (s.force[p] - s.reference[p]) * unit, s.t[p] / em.gamma0);
  return 0;
}

int run_subradiant(const RunConfig& cfg) {
  const std::string hash = config_hash(cfg);
  const EmitterParams em = cfg.emitter();
  const Medium medium = cfg.medium();
  const std::vector<double> xs = cfg.subradiant_x0();
  std::vector<SubradiantRow> rows(xs.size());
  std::vector<std::string> errors(xs.size());
  CouplingCache cache;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < xs.size(); i = next++) {
      try {
        const CouplingSet c = build_couplings(Geometry{cfg.sub_n, xs[i], cfg.sub_z0_k0}, medium, em, cfg.quad, &cache);
        require_psd_gamma(c);
        SubradiantRow& r = rows[i];
        r.x0 = xs[i];
        r.z0 = cfg.sub_z0_k0;
        for (int k = 0; k < c.size(); ++k) {
          r.F_g -= c.d_omega_minus[k];
          r.F_e -= c.d_omega_plus[k];
        }
        r.forces = subradiant_forces(c);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < cfg.threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!errors[i].empty()) throw NumericalError("subradiant sweep failed at x0_k0 = " + std::to_string(xs[i]) + ": " + errors[i]);

  const std::string out = path_in(cfg, "subradiant.csv");
  write_file(out, subradiant_csv(rows, hash));
  report(out);
  json summary{{"n", cfg.sub_n}, {"degeneracy", subradiant_degeneracy(cfg.sub_n)}};
  const std::string side = path_in(cfg, "subradiant.config.json");
  write_file(side, sidecar_json("subradiant", hash, to_ini(cfg), summary.dump()));
  report(side);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective Casimir-Polder forces on emitter chains near a surface"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "INI config file")->check(CLI::ExistingFile);
    sub->add_option("--preset", opt.preset_name, "named preset (fig2-gold, fig3-siv)");
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--set", opt.settings, "override section.key=value (repeatable)");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* coeffs = app.add_subcommand("coeffs", "coupling coefficients as JSON");
  auto* map = app.add_subcommand("map", "two-emitter force and decay map as CSV");
  auto* dyn = app.add_subcommand("dynamics", "time-dependent force and superradiant boost as CSV");
  auto* sub = app.add_subcommand("subradiant", "forces on the subradiant basis states as CSV");
  for (auto* s : {coeffs, map, dyn, sub}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const RunConfig cfg = resolve(opt);
    if (coeffs->parsed()) return run_coeffs(cfg);
    if (map->parsed()) return run_map(cfg);
    if (dyn->parsed()) return run_dynamics(cfg);
    return run_subradiant(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
}
