#include "cpforce/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/bessel.hpp>

#include "cpforce/error.hpp"

namespace cpforce {

// ---------------------------------------------------------------------------
// Parameters

EmitterParams EmitterParams::from_wavelength(double lambda0, double gamma0) {
  if (!(lambda0 > 0.0)) throw ConfigError("emitter wavelength must be positive");
  EmitterParams e;
  e.omega0 = 2.0 * pi * si::c / lambda0;
  e.gamma0 = gamma0;
  e.validate();
  return e;
}

EmitterParams EmitterParams::from_wavelength_lifetime(double lambda0, double lifetime) {
  if (!(lifetime > 0.0)) throw ConfigError("emitter lifetime must be positive");
  return from_wavelength(lambda0, 1.0 / lifetime);
}

double EmitterParams::k0() const { return omega0 / si::c; }
double EmitterParams::wavelength() const { return 2.0 * pi * si::c / omega0; }

double EmitterParams::dipole_moment() const {
  return std::sqrt(3.0 * pi * si::epsilon0 * si::hbar * si::c * si::c * si::c * gamma0 /
                   (omega0 * omega0 * omega0));
}

double EmitterParams::force_unit() const { return si::hbar * gamma0 * k0(); }

void EmitterParams::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ConfigError("emitter omega0 must be positive");
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw ConfigError("emitter gamma0 must be positive");
  if (std::abs(orientation.norm() - 1.0) > 1e-12) throw ConfigError("dipole orientation must be a unit vector");
}

std::vector<Vec3> Geometry::positions() const {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.emplace_back(i * x0, 0.0, z0);
  return out;
}

void Geometry::validate() const {
  if (n < 1) throw ConfigError("geometry: emitter count N must be >= 1");
  if (!(z0 > 0.0) || !std::isfinite(z0)) throw ConfigError("geometry: z0 must be positive");
  if (!(x0 >= 0.0) || !std::isfinite(x0)) throw ConfigError("geometry: x0 must be non-negative");
}

double CouplingSet::min_gamma_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double CouplingSet::max_gamma_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

void require_psd_gamma(const CouplingSet& c, double tol) {
  const double lo = c.min_gamma_eigenvalue();
  if (lo < -tol)
    throw DomainError("Gamma matrix is not positive semidefinite (min eigenvalue " + std::to_string(lo) + ")");
}

// ---------------------------------------------------------------------------
// Single-site and pair coefficients

namespace {

TensorEntries entries_for(const EmitterParams& e) {
  return e.orientation == Vec3::UnitZ() ? TensorEntries::zz : TensorEntries::all;
}

Eigen::Vector3cd dipole(const EmitterParams& e) { return e.orientation.cast<complex>(); }

Vec3 site_position(const Geometry& g, int n) {
  if (n < 0 || n >= g.n) throw DomainError("emitter index out of range");
  return Vec3(n * g.x0, 0.0, g.z0);
}

/// d.G.d and its d/dz0 (= 2 d/dZ) at real frequency w0 = 1.
struct Projected {
  complex value;
  complex d_dz0;
  double error;
};

Projected resonant_projection(const Vec3& r1, const Vec3& r2, const Medium& medium, const EmitterParams& emitter,
                              const QuadratureSpec& quad) {
  const auto p = greens_scatter_with_dz(r1, r2, Frequency::real(1.0), medium, quad, entries_for(emitter));
  const auto d = dipole(emitter);
  return {dipole_projection(p.value, d, d), 2.0 * dipole_projection(p.d_dz, d, d), p.value.error};
}

}  // namespace

ValueAndSlope omega_minus(const Geometry& geometry, int n, const Medium& medium, const EmitterParams& emitter,
                          const QuadratureSpec& quad) {
  geometry.validate();
  const Vec3 r = site_position(geometry, n);
  if (medium.model() == Medium::Model::vacuum) return {};

  const QuadratureSpec inner = quad.tightened(0.1);
  const auto d = dipole(emitter);
  const TensorEntries entries = entries_for(emitter);
  const double z0 = geometry.z0;
  double inner_error = 0.0;

  // s = tan(u): ds s^2 / (s^2 + 1) = tan^2(u) du.
  auto integrand = [&](double u) -> Eigen::Vector2d {
    const double s = std::tan(u);
    if (!(s > 0.0) || !std::isfinite(s)) return Eigen::Vector2d::Zero();
    if (2.0 * s * z0 > quad.tail_cutoff) return Eigen::Vector2d::Zero();  // e^{-2 s z0} envelope
    const auto p = greens_scatter_with_dz(r, r, Frequency::imaginary(s), medium, inner, entries);
    inner_error = std::max(inner_error, p.value.error);
    const double t2 = s * s;
    // Second component carries z0 * d/dz0 so both are on the same scale.
    return Eigen::Vector2d(t2 * dipole_projection(p.value, d, d).real(),
                           t2 * z0 * 2.0 * dipole_projection(p.d_dz, d, d).real());
  };
  const auto res = integrate<Eigen::Vector2d>(integrand, 0.0, 0.5 * pi, quad);
  ValueAndSlope out;
  out.value = 3.0 * res.value[0];
  out.d_dz = 3.0 * res.value[1] / z0;
  out.error = 3.0 * (res.error + 0.5 * pi * inner_error);
  return out;
}

ValueAndSlope omega_res(const Geometry& geometry, int n, const Medium& medium, const EmitterParams& emitter,
                        const QuadratureSpec& quad) {
  geometry.validate();
  const Vec3 r = site_position(geometry, n);
  if (medium.model() == Medium::Model::vacuum) return {};
  const auto p = resonant_projection(r, r, medium, emitter, quad);
  return {-3.0 * pi * p.value.real(), -3.0 * pi * p.d_dz0.real(), 3.0 * pi * p.error};
}

ValueAndSlope gamma_self_sc(const Geometry& geometry, int n, const Medium& medium, const EmitterParams& emitter,
                            const QuadratureSpec& quad) {
  geometry.validate();
  const Vec3 r = site_position(geometry, n);
  if (medium.model() == Medium::Model::vacuum) return {};
  const auto p = resonant_projection(r, r, medium, emitter, quad);
  return {6.0 * pi * p.value.imag(), 6.0 * pi * p.d_dz0.imag(), 6.0 * pi * p.error};
}

double omega_free_pair(double separation, const Vec3& orientation) {
  if (!(separation > 0.0)) throw DomainError("free-space dipole-dipole shift is singular at zero separation");
  const auto g = greens_free(Vec3(separation, 0.0, 0.0), Vec3::Zero(), Frequency::real(1.0));
  const Eigen::Vector3cd d = orientation.cast<complex>();
  return -3.0 * pi * dipole_projection(g, d, d).real();
}

double gamma_free_pair(double separation, const Vec3& orientation) {
  const auto g = greens_free(Vec3(separation, 0.0, 0.0), Vec3::Zero(), Frequency::real(1.0),
                             FreeSpacePart::imaginary_only);
  const Eigen::Vector3cd d = orientation.cast<complex>();
  return 6.0 * pi * dipole_projection(g, d, d).imag();
}

PairCoupling pair_coupling(const Geometry& geometry, int m, int n, const Medium& medium,
                           const EmitterParams& emitter, const QuadratureSpec& quad) {
  geometry.validate();
  if (m == n) throw DomainError("pair_coupling needs two distinct emitters");
  const Vec3 rm = site_position(geometry, m);
  const Vec3 rn = site_position(geometry, n);
  const double sep = (rm - rn).norm();

  PairCoupling out;
  out.gamma_free = gamma_free_pair(sep, emitter.orientation);
  if (sep > 0.0) out.omega_free = omega_free_pair(sep, emitter.orientation);
  if (medium.model() != Medium::Model::vacuum) {
    const auto p = resonant_projection(rm, rn, medium, emitter, quad);
    out.omega_sc = {-3.0 * pi * p.value.real(), -3.0 * pi * p.d_dz0.real(), 3.0 * pi * p.error};
    out.gamma_sc = {6.0 * pi * p.value.imag(), 6.0 * pi * p.d_dz0.imag(), 6.0 * pi * p.error};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Near-field closed forms

namespace {

/// int_0^inf dk w(k) e^{-2 k z} J0(x sqrt(1 + k^2)) with k = v / (2 z).
template <class Weight>
double evanescent_j0_integral(double x0, double z0, const QuadratureSpec& quad, Weight weight) {
  if (!(z0 > 0.0)) throw DomainError("cooperativity: z0 must be positive");
  if (!(x0 >= 0.0)) throw DomainError("cooperativity: x0 must be non-negative");
  const double scale = 1.0 / (2.0 * z0);
  auto f = [&](double v) {
    const double k = v * scale;
    const double j0 = x0 == 0.0 ? 1.0 : boost::math::cyl_bessel_j(0, x0 * std::sqrt(1.0 + k * k));
    return weight(k) * std::exp(-v) * j0 * scale;
  };
  const double span = quad.tail_cutoff;
  const auto panels = static_cast<std::size_t>(std::min(200000.0, std::ceil(x0 * span * scale / pi) + 1.0));
  return integrate<double>(f, 0.0, span, quad, panels).value;
}

}  // namespace

double cooperativity_f(double x0, double z0, const QuadratureSpec& quad) {
  const double z4 = z0 * z0 * z0 * z0;
  return 8.0 * z4 / 3.0 *
         evanescent_j0_integral(x0, z0, quad, [](double k) { return k * (k * k + 1.0); });
}

double cooperativity_g(double x0, double z0, const QuadratureSpec& quad) {
  return evanescent_j0_integral(x0, z0, quad, [](double k) { return 1.0 + k * k; });
}

NonretardedForms nonretarded_closed_forms(const Geometry& geometry, const Medium& medium,
                                          const QuadratureSpec& quad, double pole_guard) {
  geometry.validate();
  NonretardedForms out;
  const double z = geometry.z0;
  const double z3 = z * z * z;
  const double z4 = z3 * z;
  if (z > 0.3) out.warning = "k0 z0 > 0.3: near-field closed forms are outside their range of validity";

  // Lossless image factor (eps-1)/(eps+1) at w0 and the matching Drude ratios.
  double ratio_g = 1.0, ratio_e = 1.0, ratio_inf = 1.0;
  switch (medium.model()) {
    case Medium::Model::vacuum:
      ratio_g = ratio_e = ratio_inf = 0.0;
      break;
    case Medium::Model::perfect_conductor:
      break;
    case Medium::Model::drude: {
      const double wp = medium.plasma_frequency();
      const double denom = wp * wp - 2.0;
      if (std::abs(denom) < pole_guard * std::max(1.0, wp * wp))
        throw ResonanceError("plasmon pole: wp^2 = 2 w0^2 makes the near-field forces diverge");
      ratio_g = wp / (wp + std::sqrt(2.0));
      ratio_e = wp / (wp - std::sqrt(2.0));
      ratio_inf = wp * wp / denom;
      break;
    }
  }

  out.F_g = -9.0 * ratio_g / (16.0 * z4);
  out.F_e = -9.0 * ratio_e / (16.0 * z4);
  out.F_inf = -9.0 * ratio_inf / (16.0 * z4);
  out.f = cooperativity_f(geometry.x0, z, quad);
  out.g = cooperativity_g(geometry.x0, z, quad);
  out.F_sup = out.F_inf * (1.0 + out.f);
  out.F_sub = out.F_inf * (1.0 - out.f);

  const double im_image = image_factor(medium, Frequency::real(1.0)).imag();
  out.gamma_nn_sc = 3.0 / (8.0 * z3) * im_image;
  out.gamma_mn_sc = 1.5 * im_image * out.g;
  return out;
}

// ---------------------------------------------------------------------------
// Cache and assembly

CouplingCache::Key CouplingCache::make_key(double separation, double z0, const Medium& medium,
                                           const EmitterParams& emitter, const QuadratureSpec& quad) {
  return Key{separation,
             z0,
             static_cast<int>(medium.model()),
             medium.plasma_frequency(),
             medium.loss_rate(),
             medium.permeability(),
             emitter.orientation.x(),
             emitter.orientation.y(),
             emitter.orientation.z(),
             quad.rel_tol};
}

CouplingCache::SiteCoefficients CouplingCache::site(double z0, const Medium& medium, const EmitterParams& emitter,
                                                    const QuadratureSpec& quad) {
  const Key key = make_key(0.0, z0, medium, emitter, quad);
  {
    std::shared_lock lock(mutex_);
    if (auto it = sites_.find(key); it != sites_.end()) return it->second;
  }
  const Geometry g{1, 0.0, z0};
  SiteCoefficients s{omega_minus(g, 0, medium, emitter, quad), omega_res(g, 0, medium, emitter, quad),
                     gamma_self_sc(g, 0, medium, emitter, quad)};
  std::unique_lock lock(mutex_);
  sites_.emplace(key, s);
  return s;
}

PairCoupling CouplingCache::pair(double separation, double z0, const Medium& medium, const EmitterParams& emitter,
                                 const QuadratureSpec& quad) {
  const Key key = make_key(separation, z0, medium, emitter, quad);
  {
    std::shared_lock lock(mutex_);
    if (auto it = pairs_.find(key); it != pairs_.end()) return it->second;
  }
  const Geometry g{2, separation, z0};
  PairCoupling p = pair_coupling(g, 1, 0, medium, emitter, quad);
  std::unique_lock lock(mutex_);
  pairs_.emplace(key, p);
  return p;
}

std::size_t CouplingCache::size() const {
  std::shared_lock lock(mutex_);
  return sites_.size() + pairs_.size();
}

void CouplingCache::clear() {
  std::unique_lock lock(mutex_);
  sites_.clear();
  pairs_.clear();
}

CouplingSet build_couplings(const Geometry& geometry, const Medium& medium, const EmitterParams& emitter,
                            const QuadratureSpec& quad, CouplingCache* cache) {
  geometry.validate();
  const int n = geometry.n;
  if (n > 1 && !(geometry.x0 > 0.0))
    throw DomainError("coincident emitters: the free-space dipole-dipole shift diverges at x0 = 0");

  CouplingCache local;
  CouplingCache& c = cache ? *cache : local;

  CouplingSet out;
  out.geometry = geometry;
  const auto site = c.site(geometry.z0, medium, emitter, quad);

  const auto un = static_cast<std::size_t>(n);
  out.omega_minus.assign(un, site.omega_minus.value);
  out.d_omega_minus.assign(un, site.omega_minus.d_dz);
  out.omega_res.assign(un, site.omega_res.value);
  out.d_omega_res.assign(un, site.omega_res.d_dz);
  out.omega_plus.assign(un, site.omega_res.value - site.omega_minus.value);
  out.d_omega_plus.assign(un, site.omega_res.d_dz - site.omega_minus.d_dz);
  out.max_quadrature_error = std::max({site.omega_minus.error, site.omega_res.error, site.gamma_sc.error});

  out.omega_free = Eigen::MatrixXd::Zero(n, n);
  out.omega_sc = Eigen::MatrixXd::Zero(n, n);
  out.gamma_free = Eigen::MatrixXd::Identity(n, n);
  out.gamma_sc = Eigen::MatrixXd::Identity(n, n) * site.gamma_sc.value;
  out.d_omega_sc = Eigen::MatrixXd::Zero(n, n);
  out.d_gamma_sc = Eigen::MatrixXd::Identity(n, n) * site.gamma_sc.d_dz;

  // Couplings depend only on |m - n| along the chain.
  for (int j = 1; j < n; ++j) {
    const PairCoupling p = c.pair(j * geometry.x0, geometry.z0, medium, emitter, quad);
    out.max_quadrature_error = std::max({out.max_quadrature_error, p.omega_sc.error, p.gamma_sc.error});
    for (int a = 0; a + j < n; ++a) {
      const int b = a + j;
      for (auto [r, s] : {std::pair{a, b}, std::pair{b, a}}) {
        out.omega_free(r, s) = p.omega_free;
        out.omega_sc(r, s) = p.omega_sc.value;
        out.d_omega_sc(r, s) = p.omega_sc.d_dz;
        out.gamma_free(r, s) = p.gamma_free;
        out.gamma_sc(r, s) = p.gamma_sc.value;
        out.d_gamma_sc(r, s) = p.gamma_sc.d_dz;
      }
    }
  }
  return out;
}

}  // namespace cpforce
