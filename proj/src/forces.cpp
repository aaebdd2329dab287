#include "cpforce/forces.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "cpforce/error.hpp"

namespace cpforce {

double force_from_moments(const CouplingSet& c, const Eigen::VectorXd& populations,
                          const Eigen::MatrixXd& correlators) {
  const int n = c.size();
  if (populations.size() != n || correlators.rows() != n || correlators.cols() != n)
    throw DomainError("moment and coupling dimensions differ");
  double f = 0.0;
  for (int i = 0; i < n; ++i)
    f -= c.d_omega_plus[i] * populations[i] + c.d_omega_minus[i] * (1.0 - populations[i]);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < m; ++k) f -= c.d_omega_sc(m, k) * correlators(m, k);
  return f;
}

double force_of_state(const QuantumState& state, const CouplingSet& c) {
  const int n = c.size();
  if (state.emitters() != n) throw DomainError("state has " + std::to_string(state.emitters()) +
                                               " emitters but the couplings describe " + std::to_string(n));
  Eigen::VectorXd p(n);
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) p[i] = excited_population(state, i);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < m; ++k) corr(m, k) = corr(k, m) = pair_correlator(state, m, k);
  return force_from_moments(c, p, corr);
}

SpecialStateForces special_state_forces(const CouplingSet& c) {
  if (c.size() != 2) throw DomainError("special-state forces are defined for two emitters");
  SpecialStateForces s;
  s.F_g = -(c.d_omega_minus[0] + c.d_omega_minus[1]);
  s.F_e = -(c.d_omega_plus[0] + c.d_omega_plus[1]);
  const double res = -0.5 * (c.d_omega_res[0] + c.d_omega_res[1]);
  s.F_sup = res - c.d_omega_sc(0, 1);
  s.F_sub = res + c.d_omega_sc(0, 1);
  s.F_inf = 0.5 * (s.F_g + s.F_e);
  const Eigen::MatrixXd g = c.gamma();
  s.gamma_sup = 0.5 * (g(0, 0) + g(1, 1)) + g(0, 1);
  s.gamma_sub = 0.5 * (g(0, 0) + g(1, 1)) - g(0, 1);
  s.gamma_nn = g(0, 0);
  return s;
}

SpecialStateForces special_state_forces(double x0, double z0, const Medium& medium, const EmitterParams& emitter,
                                        const QuadratureSpec& quad, CouplingCache* cache) {
  return special_state_forces(build_couplings(Geometry{2, x0, z0}, medium, emitter, quad, cache));
}

double superradiant_force_N(const CouplingSet& c) {
  const int n = c.size();
  if (n < 2 || n % 2 != 0) throw DomainError("superradiant_force_N needs an even emitter count");
  double res = 0.0, sc = 0.0;
  for (int i = 0; i < n; ++i) res += c.d_omega_res[i];
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < m; ++k) sc += c.d_omega_sc(m, k);
  const double coeff = static_cast<double>(binomial(n - 2, n / 2 - 1)) / static_cast<double>(binomial(n, n / 2));
  return -0.5 * res - 2.0 * coeff * sc;
}

std::vector<double> subradiant_forces(const CouplingSet& c) {
  std::vector<double> out;
  for (const auto& s : subradiant_basis(c.size())) out.push_back(force_of_state(s, c));
  return out;
}

void MapGrid::validate() const {
  if (x0.empty() || z0.empty()) throw ConfigError("map grid is empty");
  for (double x : x0)
    if (!(x >= 1e-4 && x <= 10.0)) throw ConfigError("map grid x0 outside [1e-4, 10] (units 1/k0)");
  for (double z : z0)
    if (!(z >= 1e-3 && z <= 1.0)) throw ConfigError("map grid z0 outside [1e-3, 1] (units 1/k0)");
}

ForceMap force_map(const MapGrid& grid, const Medium& medium, const EmitterParams& emitter,
                   const QuadratureSpec& quad, int threads) {
  grid.validate();
  if (threads < 1) throw ConfigError("threads must be >= 1");
  ForceMap map;
  map.grid = grid;
  const std::size_t total = grid.x0.size() * grid.z0.size();
  map.cells.resize(total);
  std::vector<std::string> errors(total);

  CouplingCache cache;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      MapCell& cell = map.cells[i];
      cell.z0 = grid.z0[i / grid.x0.size()];
      cell.x0 = grid.x0[i % grid.x0.size()];
      try {
        const CouplingSet c = build_couplings(Geometry{2, cell.x0, cell.z0}, medium, emitter, quad, &cache);
        require_psd_gamma(c);
        cell.forces = special_state_forces(c);
      } catch (const std::exception& e) {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        cell.forces = {nan, nan, nan, nan, nan, nan, nan, nan};
        cell.failed = true;
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < total; ++i)
    if (map.cells[i].failed) map.failures.push_back({i, map.cells[i].x0, map.cells[i].z0, errors[i]});
  return map;
}

}  // namespace cpforce
