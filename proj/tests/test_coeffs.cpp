#include <doctest.h>

#include <cmath>

#include "cpforce/coeffs.hpp"
#include "cpforce/error.hpp"
#include "support.hpp"

using namespace cpforce;
using cpforce::testing::Gen;
using cpforce::testing::rel_diff;

namespace {

// zz entry of the free tensor for a separation r along z, w = 1.
complex free_zz_axial(double r) {
  return std::exp(complex(0.0, r)) / (4.0 * pi * r) * complex(2.0 / (r * r), -2.0 / r);
}

// zz entry for a separation vector with lateral part x and vertical part h.
complex free_zz(double x, double h) {
  const double r = std::hypot(x, h);
  const double c = h * h / (r * r);
  const complex pre = std::exp(complex(0.0, r)) / (4.0 * pi * r);
  return pre * (complex(1.0 - 1.0 / (r * r), 1.0 / r) + c * complex(-1.0 + 3.0 / (r * r), -3.0 / r));
}

}  // namespace

TEST_CASE("free-space pair couplings for z dipoles along a chain") {
  const Vec3 z = Vec3::UnitZ();
  for (double r : {1e-3, 0.05, 0.5, 2.0, 9.0}) {
    const double s = std::sin(r), c = std::cos(r);
    const double gamma = 1.5 * (s / r + c / (r * r) - s / (r * r * r));
    const double omega = -0.75 * (c / r - s / (r * r) - c / (r * r * r));
    INFO("r " << r);
    CHECK(gamma_free_pair(r, z) == doctest::Approx(gamma).epsilon(1e-10));
    CHECK(omega_free_pair(r, z) == doctest::Approx(omega).epsilon(1e-12));
  }
  CHECK(gamma_free_pair(0.0, z) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(omega_free_pair(0.0, z), DomainError);
}

TEST_CASE("perfect mirror: single-site shifts and rates equal the image-dipole closed forms") {
  const EmitterParams e = cpforce::testing::emitter_700nm();
  const Medium pc = Medium::perfect_conductor();
  for (double z : {0.01, 0.1, 0.7, 2.0}) {
    const Geometry g{1, 0.0, z};
    const complex gzz = free_zz_axial(2.0 * z);
    INFO("z " << z);
    CHECK(rel_diff(omega_res(g, 0, pc, e, {}).value, -3.0 * pi * gzz.real()) < 1e-7);
    CHECK(rel_diff(gamma_self_sc(g, 0, pc, e, {}).value, 6.0 * pi * gzz.imag()) < 1e-7);
  }
}

TEST_CASE("perfect mirror: pair scattering couplings equal the image-dipole closed forms") {
  const EmitterParams e = cpforce::testing::emitter_700nm();
  const Medium pc = Medium::perfect_conductor();
  for (double z : {0.02, 0.3}) {
    for (double x : {0.01, 0.4, 3.0}) {
      const complex gzz = free_zz(x, 2.0 * z);
      const PairCoupling p = pair_coupling(Geometry{2, x, z}, 0, 1, pc, e, {});
      INFO("z " << z << " x " << x);
      CHECK(rel_diff(p.omega_sc.value, -3.0 * pi * gzz.real()) < 1e-7);
      CHECK(rel_diff(p.gamma_sc.value, 6.0 * pi * gzz.imag()) < 1e-6);
    }
  }
}

TEST_CASE("perfect mirror ground-state shift approaches -3/(32 z^3)") {
  const EmitterParams e = cpforce::testing::emitter_700nm();
  for (double z : {0.002, 0.005}) {
    const ValueAndSlope v = omega_minus(Geometry{1, 0.0, z}, 0, Medium::perfect_conductor(), e, {});
    const double oracle = -3.0 / (32.0 * z * z * z);
    INFO("z " << z);
    CHECK(rel_diff(v.value, oracle) < 10.0 * z);
    CHECK(rel_diff(v.d_dz, 9.0 / (32.0 * z * z * z * z)) < 10.0 * z);
  }
}

TEST_CASE("near-field surface decay matches the image-dipole oracle") {
  const EmitterParams e = cpforce::testing::emitter_700nm();
  const Medium m = cpforce::testing::gold(e);
  const double im = image_factor(m, Frequency::real(1.0)).imag();
  for (double z : {0.005, 0.01}) {
    const double oracle = 3.0 / (8.0 * z * z * z) * im;
    const double g = gamma_self_sc(Geometry{1, 0.0, z}, 0, m, e, {}).value;
    INFO("z " << z << " gamma " << g << " oracle " << oracle);
    CHECK(rel_diff(g, oracle) < 0.05);
  }
}

TEST_CASE("cooperativity integrals at zero separation") {
  for (double z : {1e-3, 0.01, 0.1, 0.5}) {
    CHECK(cooperativity_f(0.0, z) == doctest::Approx(1.0 + 2.0 / 3.0 * z * z).epsilon(1e-10));
    CHECK(cooperativity_g(0.0, z) == doctest::Approx(1.0 / (2.0 * z) + 1.0 / (4.0 * z * z * z)).epsilon(1e-10));
  }
}

TEST_CASE("cooperativity falls off over x0 ~ z0 and tends to 0") {
  double last = cooperativity_f(1e-4, 0.01);
  for (double x : {0.003, 0.01, 0.02}) {
    const double f = cooperativity_f(x, 0.01);
    CHECK(f < last);
    last = f;
  }
  for (double x : {0.05, 0.1, 1.0}) CHECK(std::abs(cooperativity_f(x, 0.01)) < 0.1);
  CHECK(std::abs(cooperativity_f(5.0, 0.01)) < 1e-3);
}

TEST_CASE("coupling set structure") {
  const EmitterParams e = cpforce::testing::emitter_700nm();
  const Medium m = cpforce::testing::gold(e);
  const CouplingSet c = build_couplings(Geometry{4, 0.05, 0.03}, m, e, {});
  REQUIRE(c.size() == 4);
  for (int n = 0; n < 4; ++n) {
    CHECK(c.omega_plus[n] == doctest::Approx(-c.omega_minus[n] + c.omega_res[n]).epsilon(1e-14));
    CHECK(c.d_omega_plus[n] == doctest::Approx(-c.d_omega_minus[n] + c.d_omega_res[n]).epsilon(1e-14));
    CHECK(c.omega_free(n, n) == 0.0);
    CHECK(c.omega_sc(n, n) == 0.0);
    CHECK(c.gamma_free(n, n) == doctest::Approx(1.0));
  }
  CHECK((c.omega_sc - c.omega_sc.transpose()).norm() == 0.0);
  CHECK((c.gamma_sc - c.gamma_sc.transpose()).norm() == 0.0);
  // Translation invariance along the chain.
  CHECK(c.gamma_sc(0, 1) == doctest::Approx(c.gamma_sc(2, 3)).epsilon(1e-14));
  CHECK(c.omega_res[0] == doctest::Approx(c.omega_res[3]).epsilon(1e-14));
}

TEST_CASE("pair scattering couplings tend to the single-site values as x0 -> 0") {
  const EmitterParams e = cpforce::testing::emitter_700nm();
  const Medium m = cpforce::testing::gold(e);
  const CouplingSet c = build_couplings(Geometry{2, 1e-4, 0.01}, m, e, {});
  CHECK(rel_diff(c.omega_sc(0, 1), c.omega_res[0]) < 1e-3);
  CHECK(rel_diff(c.gamma_sc(0, 1), c.gamma_sc(0, 0)) < 1e-3);
  CHECK(rel_diff(c.d_omega_sc(0, 1), c.d_omega_res[0]) < 1e-3);
}

TEST_CASE("analytic z0-derivatives match central differences (step 1e-4)") {
  const EmitterParams e = cpforce::testing::emitter_700nm();
  const Medium m = cpforce::testing::gold(e);
  const QuadratureSpec q = QuadratureSpec{}.tightened(1e-2);
  const double h = 1e-4;
  for (double z : {0.05, 0.2}) {
    for (double x : {0.01, 0.3}) {
      const CouplingSet c = build_couplings(Geometry{2, x, z}, m, e, q);
      const CouplingSet up = build_couplings(Geometry{2, x, z + 0.5 * h}, m, e, q);
      const CouplingSet dn = build_couplings(Geometry{2, x, z - 0.5 * h}, m, e, q);
      INFO("z " << z << " x " << x);
      CHECK(rel_diff(c.d_omega_minus[0], (up.omega_minus[0] - dn.omega_minus[0]) / h) < 1e-5);
      CHECK(rel_diff(c.d_omega_res[0], (up.omega_res[0] - dn.omega_res[0]) / h) < 1e-5);
      CHECK(rel_diff(c.d_omega_sc(0, 1), (up.omega_sc(0, 1) - dn.omega_sc(0, 1)) / h) < 1e-5);
      CHECK(rel_diff(c.d_gamma_sc(0, 1), (up.gamma_sc(0, 1) - dn.gamma_sc(0, 1)) / h) < 1e-5);
    }
  }
}

TEST_CASE("Gamma matrix is positive semidefinite on random geometries") {
  Gen gen(31);
  const EmitterParams e = cpforce::testing::emitter_700nm();
  CouplingCache cache;
  for (int trial = 0; trial < 25; ++trial) {
    const Medium m = gen.drude();
    const Geometry g{gen.integer(2, 5), gen.log_uniform(1e-3, 3.0), gen.log_uniform(5e-3, 1.0)};
    INFO("trial " << trial << " n " << g.n << " x " << g.x0 << " z " << g.z0);
    const CouplingSet c = build_couplings(g, m, e, {}, &cache);
    CHECK(c.min_gamma_eigenvalue() >= -1e-10 * c.max_gamma_eigenvalue());
    CHECK_NOTHROW(require_psd_gamma(c));
  }
}

TEST_CASE("a non-PSD Gamma matrix is rejected") {
  const EmitterParams e = cpforce::testing::emitter_700nm();
  CouplingSet c = build_couplings(Geometry{2, 0.5, 0.1}, Medium::vacuum(), e, {});
  c.gamma_sc(0, 1) = c.gamma_sc(1, 0) = 5.0;
  CHECK_THROWS_AS(require_psd_gamma(c), DomainError);
}

TEST_CASE("vacuum: no surface terms") {
  const EmitterParams e = cpforce::testing::emitter_700nm();
  const CouplingSet c = build_couplings(Geometry{3, 0.2, 0.05}, Medium::vacuum(), e, {});
  CHECK(c.omega_sc.norm() == 0.0);
  CHECK(c.gamma_sc.norm() == 0.0);
  CHECK(c.d_omega_sc.norm() == 0.0);
  for (int n = 0; n < 3; ++n) {
    CHECK(c.omega_plus[n] == 0.0);
    CHECK(c.omega_minus[n] == 0.0);
  }
}

TEST_CASE("cache returns identical couplings") {
  const EmitterParams e = cpforce::testing::emitter_700nm();
  const Medium m = cpforce::testing::gold(e);
  CouplingCache cache;
  const CouplingSet a = build_couplings(Geometry{3, 0.05, 0.02}, m, e, {}, &cache);
  const CouplingSet b = build_couplings(Geometry{3, 0.05, 0.02}, m, e, {}, &cache);
  const CouplingSet u = build_couplings(Geometry{3, 0.05, 0.02}, m, e, {});
  CHECK(cache.size() > 0);
  CHECK((a.omega_sc - b.omega_sc).norm() == 0.0);
  CHECK((a.gamma_sc - u.gamma_sc).norm() == 0.0);
  CHECK(a.d_omega_minus == u.d_omega_minus);
}

TEST_CASE("unit conversions") {
  const EmitterParams e = EmitterParams::from_wavelength_lifetime(737e-9, 1.7e-9);
  CHECK(e.k0() == doctest::Approx(2.0 * pi / 737e-9).epsilon(1e-14));
  CHECK(e.gamma0 == doctest::Approx(1.0 / 1.7e-9));
  CHECK(e.force_unit() == doctest::Approx(si::hbar * e.gamma0 * e.k0()).epsilon(1e-14));
  CHECK(e.wavelength() == doctest::Approx(737e-9).epsilon(1e-14));
}

TEST_CASE("invalid geometry and emitter parameters") {
  const EmitterParams e = cpforce::testing::emitter_700nm();
  CHECK_THROWS_AS(build_couplings(Geometry{2, 0.1, 0.0}, Medium::vacuum(), e, {}), ConfigError);
  CHECK_THROWS_AS(build_couplings(Geometry{0, 0.1, 0.1}, Medium::vacuum(), e, {}), ConfigError);
  CHECK_THROWS_AS(EmitterParams::from_wavelength(-1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(build_couplings(Geometry{2, 0.0, 0.1}, Medium::vacuum(), e, {}), DomainError);
}
