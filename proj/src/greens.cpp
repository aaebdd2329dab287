#include "cpforce/greens.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/bessel.hpp>

#include "cpforce/error.hpp"

namespace cpforce {

namespace {

using Vec8 = Eigen::Matrix<complex, 8, 1>;

constexpr double kInvEightPi = 1.0 / (8.0 * pi);

void check_above_surface(const Vec3& r1, const Vec3& r2) {
  if (!(r1.z() > 0.0) || !(r2.z() > 0.0))
    throw DomainError("Green's tensor: both points must lie above the surface (z > 0)");
}

struct Kernel {
  double rho;
  double Z;
  Frequency freq;
  /// -c^2/xi^2 on the imaginary axis, +c^2/w^2 on the real axis (units of 1/k0^2).
  double p_factor;
  const Medium* medium;
  TensorEntries entries;
  bool want_dz;

  // Integrand of G' (separation along +x) for one k_parallel; `weight`
  // already carries the Jacobian, the exponential and 1/(8 pi).
  Vec8 operator()(double k, complex kappa, complex weight) const {
    Vec8 out = Vec8::Zero();
    const FresnelPair r = fresnel(*medium, kappa, freq);
    const double arg = k * rho;
    double j0 = 1.0, j1 = 0.0, j2 = 0.0;
    if (arg != 0.0) {
      j0 = boost::math::cyl_bessel_j(0, arg);
      if (entries == TensorEntries::all) {
        j1 = boost::math::cyl_bessel_j(1, arg);
        j2 = boost::math::cyl_bessel_j(2, arg);
      }
    }
    const complex wp = weight * p_factor * r.r_p;
    out[2] = wp * (2.0 * k * k * j0);
    if (entries == TensorEntries::all) {
      const complex k2 = kappa * kappa;
      out[0] = weight * r.r_s * (j0 + j2) + wp * k2 * (j0 - j2);
      out[1] = weight * r.r_s * (j0 - j2) + wp * k2 * (j0 + j2);
      out[3] = wp * (2.0 * k * kappa * j1);
    }
    if (want_dz) {
      // d/dZ e^{-kappa Z} = -kappa e^{-kappa Z}; scaled by Z to keep both halves O(1) alike.
      const complex f = -kappa * Z;
      out.tail<4>() = out.head<4>() * f;
    }
    return out;
  }
};

std::size_t oscillation_panels(double rho, double span_k) {
  const double n = std::ceil(rho * span_k / pi) + 1.0;
  return static_cast<std::size_t>(std::min(n, 200000.0));
}

struct SectorSum {
  Vec8 value = Vec8::Zero();
  double error = 0.0;
};

SectorSum integrate_scatter(const Kernel& kern, const QuadratureSpec& quad) {
  SectorSum sum;
  const double Z = kern.Z;
  const double L = quad.tail_cutoff;

  if (kern.freq.is_imaginary()) {
    const double s = kern.freq.value;
    const double pref = std::exp(-s * Z) * kInvEightPi / Z;
    auto f = [&](double v) {
      const double q = v / Z;
      const double kappa = s + q;
      const double k = std::sqrt(q * (2.0 * s + q));
      return kern(k, complex(kappa, 0.0), complex(pref * std::exp(-v), 0.0));
    };
    auto res = integrate<Vec8>(f, 0.0, L, quad, oscillation_panels(kern.rho, L / Z));
    sum.value = res.value;
    sum.error = res.error;
    return sum;
  }

  const double w = kern.freq.value;
  // Evanescent sector, kappa = v / Z.
  {
    const double pref = kInvEightPi / Z;
    auto f = [&](double v) {
      const double kappa = v / Z;
      const double k = std::sqrt(kappa * kappa + w * w);
      return kern(k, complex(kappa, 0.0), complex(pref * std::exp(-v), 0.0));
    };
    auto res = integrate<Vec8>(f, 0.0, L, quad, oscillation_panels(kern.rho, L / Z));
    sum.value += res.value;
    sum.error += res.error;
  }
  // Propagating sector, kappa = -i q, q in [0, w].
  {
    auto f = [&](double q) {
      const double k = std::sqrt(std::max(0.0, w * w - q * q));
      const complex weight = complex(0.0, kInvEightPi) * std::exp(complex(0.0, q * Z));
      return kern(k, complex(0.0, -q), weight);
    };
    auto res = integrate<Vec8>(f, 0.0, w, quad, oscillation_panels(kern.rho + Z, w));
    sum.value += res.value;
    sum.error += res.error;
  }
  return sum;
}

Mat3c assemble(const complex xx, const complex yy, const complex zz, const complex xz, const Vec3& r1,
               const Vec3& r2) {
  Mat3c g;
  g << xx, 0.0, xz, 0.0, yy, 0.0, -xz, 0.0, zz;
  const double dx = r1.x() - r2.x();
  const double dy = r1.y() - r2.y();
  const double rho = std::hypot(dx, dy);
  if (rho == 0.0) return g;
  Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
  const double c = dx / rho, s = dy / rho;
  rot(0, 0) = c;
  rot(0, 1) = -s;
  rot(1, 0) = s;
  rot(1, 1) = c;
  const Eigen::Matrix3cd rc = rot.cast<complex>();
  return rc * g * rc.transpose();
}

ScatterPair scatter(const Vec3& r1, const Vec3& r2, Frequency freq, const Medium& medium,
                    const QuadratureSpec& quad, TensorEntries entries, bool want_dz) {
  check_above_surface(r1, r2);
  quad.validate();
  if (freq.is_imaginary() && !(freq.value > 0.0))
    throw DomainError("scattering Green's tensor: imaginary frequency xi must be > 0");
  if (freq.is_real() && !(freq.value > 0.0))
    throw DomainError("scattering Green's tensor: real frequency w must be > 0");

  ScatterPair out;
  out.value.r1 = out.d_dz.r1 = r1;
  out.value.r2 = out.d_dz.r2 = r2;
  out.value.freq = out.d_dz.freq = freq;
  out.value.part = out.d_dz.part = GreensPart::scattering;
  if (medium.model() == Medium::Model::vacuum) return out;

  const double Z = r1.z() + r2.z();
  const double rho = std::hypot(r1.x() - r2.x(), r1.y() - r2.y());
  const Kernel kern{rho, Z, freq, 1.0 / freq.k_squared(), &medium, entries, want_dz};
  const SectorSum s = integrate_scatter(kern, quad);

  out.value.value = assemble(s.value[0], s.value[1], s.value[2], s.value[3], r1, r2);
  out.value.error = s.error;
  if (want_dz) {
    out.d_dz.value = assemble(s.value[4], s.value[5], s.value[6], s.value[7], r1, r2) / Z;
    out.d_dz.error = s.error / Z;
  }
  return out;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol >= 0.0) || !(cancellation_floor > 0.0))
    throw ConfigError("quadrature tolerances must be positive");
  if (max_subdivisions < 1) throw ConfigError("quadrature max_subdivisions must be >= 1");
  // The discarded tail of an e^{-v} envelope with polynomial weight up to v^3
  // is below 1e-16 relative only for cutoffs past ~45.
  if (!(tail_cutoff >= 45.0)) throw ConfigError("quadrature tail_cutoff must be >= 45");
}

DyadicTensor greens_free(const Vec3& r1, const Vec3& r2, Frequency freq, FreeSpacePart part) {
  DyadicTensor out;
  out.r1 = r1;
  out.r2 = r2;
  out.freq = freq;
  out.part = GreensPart::free;
  if (!(freq.value > 0.0)) throw DomainError("free-space Green's tensor needs a non-zero frequency");

  const Vec3 d = r1 - r2;
  const double r = d.norm();
  const bool imag_only = part == FreeSpacePart::imaginary_only;

  if (r == 0.0) {
    if (!imag_only || freq.is_imaginary())
      throw DomainError("free-space Green's tensor is singular at coincident points");
    out.value = Mat3c::Identity() * complex(0.0, freq.value / (6.0 * pi));
    return out;
  }

  const Eigen::Matrix3d rr = d * d.transpose() / (r * r);

  if (freq.is_real()) {
    const double k = freq.value;
    const double u = k * r;
    // Im part through spherical Bessel functions: no cancellation at small u.
    const double j0 = boost::math::sph_bessel(0, u);
    const double j2 = boost::math::sph_bessel(2, u);
    const Eigen::Matrix3d im = k / (4.0 * pi) * ((2.0 * j0 - j2) / 3.0 * Eigen::Matrix3d::Identity() + j2 * rr);
    if (imag_only) {
      out.value = complex(0.0, 1.0) * im.cast<complex>();
      return out;
    }
    const complex e = std::exp(complex(0.0, u)) / (4.0 * pi * r);
    const complex a = 1.0 + complex(0.0, 1.0) / u - 1.0 / (u * u);
    const complex b = -1.0 - complex(0.0, 3.0) / u + 3.0 / (u * u);
    const Eigen::Matrix3d re =
        (e * a).real() * Eigen::Matrix3d::Identity() + (e * b).real() * rr;
    out.value = re.cast<complex>() + complex(0.0, 1.0) * im.cast<complex>();
    return out;
  }

  const double xi = freq.value;
  const double chi = xi * r;
  const double g = 1.0 + chi + chi * chi;
  const double h = 3.0 + 3.0 * chi + chi * chi;
  const double pref = std::exp(-chi) / (4.0 * pi * xi * xi * r * r * r);
  const Eigen::Matrix3d m = pref * (g * Eigen::Matrix3d::Identity() - h * rr);
  if (imag_only) {
    out.value = Mat3c::Zero();
    return out;
  }
  out.value = m.cast<complex>();
  return out;
}

DyadicTensor greens_scatter_imag(const Vec3& r1, const Vec3& r2, double xi, const Medium& medium,
                                 const QuadratureSpec& quad, TensorEntries entries) {
  return scatter(r1, r2, Frequency::imaginary(xi), medium, quad, entries, false).value;
}

DyadicTensor greens_scatter_real(const Vec3& r1, const Vec3& r2, double w, const Medium& medium,
                                 const QuadratureSpec& quad, TensorEntries entries) {
  return scatter(r1, r2, Frequency::real(w), medium, quad, entries, false).value;
}

DyadicTensor greens_scatter_dz(const Vec3& r1, const Vec3& r2, Frequency freq, const Medium& medium,
                               const QuadratureSpec& quad, TensorEntries entries) {
  return scatter(r1, r2, freq, medium, quad, entries, true).d_dz;
}

ScatterPair greens_scatter_with_dz(const Vec3& r1, const Vec3& r2, Frequency freq, const Medium& medium,
                                   const QuadratureSpec& quad, TensorEntries entries) {
  return scatter(r1, r2, freq, medium, quad, entries, true);
}

complex dipole_projection(const DyadicTensor& g, const Eigen::Vector3cd& d1, const Eigen::Vector3cd& d2) {
  return d1.adjoint() * g.value * d2;
}

}  // namespace cpforce
