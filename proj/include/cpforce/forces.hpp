#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpforce/coeffs.hpp"
#include "cpforce/dicke.hpp"

namespace cpforce {

/// Collective CP force along +z (attraction negative), units hbar Gamma0 k0:
///   F = -sum_n [dOmega+_n <s+s->_n + dOmega-_n <s-s+>_n]
///       - sum_{m>n} dOmega^sc_mn <s-_m s+_n + s-_n s+_m>.
double force_of_state(const QuantumState& state, const CouplingSet& c);

/// Same functional from precomputed moments: excited populations p (size N)
/// and the symmetric pair correlator matrix (diagonal ignored).
double force_from_moments(const CouplingSet& c, const Eigen::VectorXd& populations,
                          const Eigen::MatrixXd& correlators);

/// Two-emitter special states from full-quadrature couplings. Forces in
/// hbar Gamma0 k0 (totals over both emitters), rates in Gamma0 including the
/// free-space part: gamma_nn = Gamma0 + Gamma_11^sc.
struct SpecialStateForces {
  double F_g = 0.0, F_e = 0.0, F_sup = 0.0, F_sub = 0.0, F_inf = 0.0;
  double gamma_sup = 0.0, gamma_sub = 0.0, gamma_nn = 0.0;
};

SpecialStateForces special_state_forces(const CouplingSet& c);
SpecialStateForces special_state_forces(double x0, double z0, const Medium& medium, const EmitterParams& emitter,
                                        const QuadratureSpec& quad, CouplingCache* cache = nullptr);

/// Closed form for |J = N/2, M = 0>:
///   -1/2 sum dOmega_res_n - 2 C(N-2, N/2-1)/C(N, N/2) sum_{m>n} dOmega^sc_mn.
double superradiant_force_N(const CouplingSet& c);

/// Forces on the orthonormal J = 0 basis of subradiant_basis(N), in basis order.
std::vector<double> subradiant_forces(const CouplingSet& c);

struct MapGrid {
  std::vector<double> x0;  ///< lateral separations, units 1/k0
  std::vector<double> z0;  ///< heights, units 1/k0
  void validate() const;
};

struct MapCell {
  double x0 = 0.0, z0 = 0.0;
  SpecialStateForces forces;
  bool failed = false;
};

struct MapFailure {
  std::size_t index = 0;
  double x0 = 0.0, z0 = 0.0;
  std::string message;
};

/// Row-major over (z0 outer, x0 inner). Failed cells carry NaN forces and an
/// entry in `failures`.
struct ForceMap {
  MapGrid grid;
  std::vector<MapCell> cells;
  std::vector<MapFailure> failures;
};

/// Evaluates every grid point on `threads` workers; output order is fixed by
/// grid index regardless of scheduling.
ForceMap force_map(const MapGrid& grid, const Medium& medium, const EmitterParams& emitter,
                   const QuadratureSpec& quad, int threads = 1);

}  // namespace cpforce
