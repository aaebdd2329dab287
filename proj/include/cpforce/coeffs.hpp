#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "cpforce/greens.hpp"
#include "cpforce/media.hpp"
#include "cpforce/quadrature.hpp"

namespace cpforce {

/// Two-level emitter in SI units. Only the SI boundary (unit conversion,
/// dipole moment) needs omega0 and Gamma0; every coupling below is computed
/// in natural units (frequencies in Gamma0, lengths in 1/k0).
struct EmitterParams {
  double omega0 = 0.0;  ///< transition angular frequency [rad/s]
  double gamma0 = 0.0;  ///< free-space decay rate [1/s]
  Vec3 orientation = Vec3::UnitZ();

  static EmitterParams from_wavelength(double lambda0, double gamma0);
  static EmitterParams from_wavelength_lifetime(double lambda0, double lifetime);

  double k0() const;
  double wavelength() const;
  /// d0 from Gamma0 = omega0^3 d0^2 / (3 pi eps0 hbar c^3) [C m].
  double dipole_moment() const;
  /// Natural force unit hbar Gamma0 k0 [N].
  double force_unit() const;

  void validate() const;
};

/// Linear chain of N emitters at height z0 above the surface with
/// nearest-neighbour spacing x0, both in units of 1/k0.
struct Geometry {
  int n = 2;
  double x0 = 0.0;
  double z0 = 0.0;

  std::vector<Vec3> positions() const;
  void validate() const;
};

/// Coupling coefficients of the master equation in natural units: shifts and
/// rates in units of Gamma0, derivatives d/dz0 taken at fixed spacing with z0
/// in units of 1/k0 (rigid translation of the whole chain).
struct CouplingSet {
  Geometry geometry;

  std::vector<double> omega_plus, omega_minus, omega_res;
  std::vector<double> d_omega_plus, d_omega_minus, d_omega_res;

  // N x N. Diagonals of the omega matrices are unused and kept at zero.
  Eigen::MatrixXd omega_free, omega_sc;
  Eigen::MatrixXd gamma_free, gamma_sc;
  Eigen::MatrixXd d_omega_sc, d_gamma_sc;

  /// Largest quadrature error estimate among all assembled coefficients.
  double max_quadrature_error = 0.0;

  int size() const { return geometry.n; }
  Eigen::MatrixXd gamma() const { return gamma_free + gamma_sc; }
  Eigen::MatrixXd omega_dd() const { return omega_free + omega_sc; }

  /// Smallest eigenvalue of the total Gamma matrix.
  double min_gamma_eigenvalue() const;
  /// Largest eigenvalue of the total Gamma matrix (collective decay ceiling).
  double max_gamma_eigenvalue() const;
};

/// A coefficient with its z0-derivative.
struct ValueAndSlope {
  double value = 0.0;
  double d_dz = 0.0;
  double error = 0.0;
};

/// Pair couplings between two emitters at lateral separation x.
struct PairCoupling {
  double omega_free = 0.0;
  ValueAndSlope omega_sc;
  double gamma_free = 0.0;
  ValueAndSlope gamma_sc;
};

/// Off-resonant ground-state shift
///   Omega^- = 3 Gamma0 int_0^inf ds s^2/(s^2+1) d.G_sc(r, r, i s).d,
/// evaluated as an iterated integral (s = tan u outer, k_parallel inner with
/// 10x tighter tolerance). `medium` is in units of omega0.
ValueAndSlope omega_minus(const Geometry& geometry, int n, const Medium& medium, const EmitterParams& emitter,
                          const QuadratureSpec& quad);

/// Resonant excited-state shift Omega^res = -3 pi Re[d.G_sc(r, r, w0).d] (units Gamma0).
ValueAndSlope omega_res(const Geometry& geometry, int n, const Medium& medium, const EmitterParams& emitter,
                        const QuadratureSpec& quad);

/// Surface-modified single-emitter decay Gamma_nn^sc = 6 pi Im[d.G_sc(r, r, w0).d].
ValueAndSlope gamma_self_sc(const Geometry& geometry, int n, const Medium& medium, const EmitterParams& emitter,
                            const QuadratureSpec& quad);

/// Dipole-dipole shift between emitters m != n: free and scattering parts.
/// The free part is singular at zero separation; x0 = 0 is rejected for it.
PairCoupling pair_coupling(const Geometry& geometry, int m, int n, const Medium& medium,
                           const EmitterParams& emitter, const QuadratureSpec& quad);

/// Free-space parts alone (closed form), for any separation > 0.
double omega_free_pair(double separation, const Vec3& orientation);
double gamma_free_pair(double separation, const Vec3& orientation);

/// Near-field (k0 z0 << 1) closed forms for two emitters near a Drude metal,
/// with the loss rate neglected where the closed forms neglect it. Forces are
/// totals over both emitters in units of hbar Gamma0 k0; rates in Gamma0.
struct NonretardedForms {
  double F_g = 0.0;
  double F_e = 0.0;
  double F_inf = 0.0;
  double F_sup = 0.0;  ///< F_inf (1 + f)
  double F_sub = 0.0;  ///< F_inf (1 - f)
  double f = 0.0;
  double g = 0.0;
  double gamma_nn_sc = 0.0;
  double gamma_mn_sc = 0.0;
  std::string warning;
};

NonretardedForms nonretarded_closed_forms(const Geometry& geometry, const Medium& medium,
                                          const QuadratureSpec& quad = {}, double pole_guard = 1e-6);

/// Cooperativity f(x, z) = (8 z^4 / 3) int_0^inf dk k (k^2+1) e^{-2 k z} J0(x sqrt(k^2+1)).
double cooperativity_f(double x0, double z0, const QuadratureSpec& quad = {});
/// g(x, z) = int_0^inf dk (1 + k^2) e^{-2 k z} J0(x sqrt(1+k^2)).
double cooperativity_g(double x0, double z0, const QuadratureSpec& quad = {});

/// Memoizes single-site and pair coefficients per (height, separation,
/// medium, orientation, tolerance). Concurrent readers, exclusive writers.
class CouplingCache {
 public:
  struct SiteCoefficients {
    ValueAndSlope omega_minus, omega_res, gamma_sc;
  };

  SiteCoefficients site(double z0, const Medium& medium, const EmitterParams& emitter, const QuadratureSpec& quad);
  PairCoupling pair(double separation, double z0, const Medium& medium, const EmitterParams& emitter,
                    const QuadratureSpec& quad);

  std::size_t size() const;
  void clear();

 private:
  using Key = std::tuple<double, double, int, double, double, double, double, double, double, double>;
  static Key make_key(double separation, double z0, const Medium& medium, const EmitterParams& emitter,
                      const QuadratureSpec& quad);

  mutable std::shared_mutex mutex_;
  std::map<Key, SiteCoefficients> sites_;
  std::map<Key, PairCoupling> pairs_;
};

/// Assemble the full CouplingSet for a chain. `cache` may be null.
CouplingSet build_couplings(const Geometry& geometry, const Medium& medium, const EmitterParams& emitter,
                            const QuadratureSpec& quad, CouplingCache* cache = nullptr);

/// Reject coupling sets whose Gamma matrix is not positive semidefinite
/// (eigenvalues below -tol); such a generator is not of Lindblad form.
void require_psd_gamma(const CouplingSet& c, double tol = 1e-10);

}  // namespace cpforce
