#include <doctest.h>

#include <cmath>

#include "cpforce/error.hpp"
#include "cpforce/greens.hpp"
#include "support.hpp"

using namespace cpforce;
using cpforce::testing::Gen;

namespace {

// Textbook real-frequency form, independent of the library's xi-form.
Mat3c free_oracle(const Vec3& r1, const Vec3& r2, double k) {
  const Vec3 d = r1 - r2;
  const double r = d.norm();
  const Eigen::Matrix3d rr = d * d.transpose() / (r * r);
  const double kr = k * r;
  const complex pre = std::exp(complex(0.0, kr)) / (4.0 * pi * r);
  // (1 + i/kr - 1/(kr)^2) I + (-1 - 3i/kr + 3/(kr)^2) rr
  const complex c1(1.0 - 1.0 / (kr * kr), 1.0 / kr);
  const complex c2(-1.0 + 3.0 / (kr * kr), -3.0 / kr);
  return pre * (c1 * Mat3c::Identity() + c2 * rr.cast<complex>());
}

// Image-dipole oracle for a perfect mirror at z = 0.
Mat3c mirror_oracle(const Vec3& r1, const Vec3& r2, Frequency f) {
  const Vec3 image(r2.x(), r2.y(), -r2.z());
  Mat3c m = greens_free(r1, image, f).value;
  Eigen::Vector3cd flip(-1.0, -1.0, 1.0);
  return m * flip.asDiagonal();
}

double rel(const Mat3c& a, const Mat3c& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("free-space tensor matches the textbook real-frequency form") {
  Gen gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 r1(gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(0.1, 2));
    const Vec3 r2(gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(0.1, 2));
    const double w = gen.uniform(0.2, 3.0);
    INFO("trial " << trial);
    CHECK(rel(greens_free(r1, r2, Frequency::real(w)).value, free_oracle(r1, r2, w)) < 1e-12);
  }
}

TEST_CASE("Im G_free at coincident points is w/(6 pi) I") {
  const Vec3 r(0.3, -0.2, 0.5);
  const DyadicTensor g = greens_free(r, r, Frequency::real(1.7), FreeSpacePart::imaginary_only);
  CHECK((g.value - complex(0.0, 1.7 / (6.0 * pi)) * Mat3c::Identity()).norm() < 1e-15);
  CHECK_THROWS_AS(greens_free(r, r, Frequency::real(1.0)), DomainError);
}

TEST_CASE("free-space tensor on the imaginary axis is real and decays") {
  const Vec3 r1(0, 0, 1), r2(0.4, 0, 1);
  const Mat3c a = greens_free(r1, r2, Frequency::imaginary(0.5)).value;
  const Mat3c b = greens_free(r1, r2, Frequency::imaginary(5.0)).value;
  CHECK(a.imag().norm() == 0.0);
  CHECK(std::abs(b(2, 2)) < std::abs(a(2, 2)));
}

TEST_CASE("perfect-mirror scattering tensor equals the image-dipole field") {
  const Medium pc = Medium::perfect_conductor();
  const QuadratureSpec q{};
  Gen gen(22);
  for (int trial = 0; trial < 12; ++trial) {
    const Vec3 r1(0.0, 0.0, gen.log_uniform(0.01, 1.0));
    const Vec3 r2(gen.log_uniform(1e-3, 2.0), 0.0, gen.log_uniform(0.01, 1.0));
    INFO("trial " << trial << " z1 " << r1.z() << " z2 " << r2.z() << " x " << r2.x());
    const double xi = gen.log_uniform(0.05, 5.0);
    CHECK(rel(greens_scatter_imag(r1, r2, xi, pc, q).value, mirror_oracle(r1, r2, Frequency::imaginary(xi))) < 1e-7);
    const double w = gen.uniform(0.3, 2.0);
    CHECK(rel(greens_scatter_real(r1, r2, w, pc, q).value, mirror_oracle(r1, r2, Frequency::real(w))) < 1e-7);
  }
}

TEST_CASE("scattering tensor is reciprocal: G(r1, r2) = G(r2, r1)^T") {
  Gen gen(23);
  const QuadratureSpec q{};
  for (int trial = 0; trial < 8; ++trial) {
    const Medium m = gen.drude();
    const Vec3 r1(0.0, 0.0, gen.log_uniform(0.005, 0.5));
    const Vec3 r2(gen.log_uniform(1e-3, 1.0), gen.uniform(-0.5, 0.5), gen.log_uniform(0.005, 0.5));
    INFO("trial " << trial);
    const Mat3c a = greens_scatter_real(r1, r2, 1.0, m, q).value;
    const Mat3c b = greens_scatter_real(r2, r1, 1.0, m, q).value;
    CHECK((a - b.transpose()).norm() <= 1e-12 * a.norm());
    const Mat3c c = greens_scatter_imag(r1, r2, 0.8, m, q).value;
    const Mat3c d = greens_scatter_imag(r2, r1, 0.8, m, q).value;
    CHECK((c - d.transpose()).norm() <= 1e-12 * c.norm());
  }
}

TEST_CASE("analytic Z-derivative matches a central difference with step 1e-4") {
  const EmitterParams e = cpforce::testing::emitter_700nm();
  const Medium m = cpforce::testing::gold(e);
  const QuadratureSpec q = QuadratureSpec{}.tightened(1e-2);
  const double step = 1e-4;
  for (double z : {0.05, 0.2, 0.6}) {
    for (double x : {0.0, 0.1, 1.0}) {
      const Vec3 r1(0, 0, z), r2(x, 0, z);
      const Vec3 up(0, 0, 0.25 * step);  // each point moves step/4, Z moves step/2
      for (Frequency f : {Frequency::real(1.0), Frequency::imaginary(0.7)}) {
        const auto g = [&](const Vec3& s) {
          return f.is_real() ? greens_scatter_real(r1 + s, r2 + s, f.value, m, q).value
                             : greens_scatter_imag(r1 + s, r2 + s, f.value, m, q).value;
        };
        const Mat3c fd = (g(up) - g(-up)) / step;
        const Mat3c an = greens_scatter_dz(r1, r2, f, m, q).value;
        INFO("z " << z << " x " << x << " real " << f.is_real());
        CHECK(rel(an, fd) < 1e-5);
      }
    }
  }
}

TEST_CASE("value and derivative from one pass agree with separate evaluations") {
  const Medium m = Medium::drude(5.054, 0.0386);
  const QuadratureSpec q{};
  const Vec3 r1(0, 0, 0.05), r2(0.02, 0, 0.05);
  const ScatterPair p = greens_scatter_with_dz(r1, r2, Frequency::real(1.0), m, q);
  CHECK(rel(p.value.value, greens_scatter_real(r1, r2, 1.0, m, q).value) < 1e-8);
  CHECK(rel(p.d_dz.value, greens_scatter_dz(r1, r2, Frequency::real(1.0), m, q).value) < 1e-8);
}

TEST_CASE("vacuum has no scattering part") {
  const Vec3 r1(0, 0, 0.1), r2(0.3, 0, 0.1);
  CHECK(greens_scatter_real(r1, r2, 1.0, Medium::vacuum(), {}).value.norm() == 0.0);
  CHECK(greens_scatter_imag(r1, r2, 1.0, Medium::vacuum(), {}).value.norm() == 0.0);
}

TEST_CASE("separation along x leaves the xy and yz entries zero") {
  const Medium m = Medium::drude(5.054, 0.0386);
  const Mat3c g = greens_scatter_real(Vec3(0, 0, 0.1), Vec3(0.3, 0, 0.1), 1.0, m, {}).value;
  CHECK(std::abs(g(0, 1)) < 1e-14 * g.norm());
  CHECK(std::abs(g(1, 2)) < 1e-14 * g.norm());
}
