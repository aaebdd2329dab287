#pragma once

#include <Eigen/Dense>

#include "cpforce/media.hpp"
#include "cpforce/quadrature.hpp"
#include "cpforce/units.hpp"

namespace cpforce {

using Vec3 = Eigen::Vector3d;
using Mat3c = Eigen::Matrix3cd;

enum class GreensPart { free, scattering, total };

/// A 3x3 dyadic Green's tensor G(r1, r2, freq) together with the point pair
/// and frequency it was evaluated at. Positions are in units of 1/k0; the
/// tensor itself is in units of k0 (G has dimension 1/length).
struct DyadicTensor {
  Mat3c value = Mat3c::Zero();
  Vec3 r1 = Vec3::Zero();
  Vec3 r2 = Vec3::Zero();
  Frequency freq{};
  GreensPart part = GreensPart::scattering;
  /// Quadrature error estimate (Frobenius norm); zero for closed forms.
  double error = 0.0;
};

/// Which entries of the scattering tensor to evaluate. For dipoles along e_z
/// only the zz entry contributes to any coupling, so the coupling assembly asks
/// for `zz` and leaves the other entries zero.
enum class TensorEntries { all, zz };

enum class FreeSpacePart { full, imaginary_only };

/// Closed-form free-space tensor
///   G = e^{-chi} / (4 pi xi^2 r^3) [g(chi) I - h(chi) rr/r^2],  chi = xi r,
/// with g = 1 + chi + chi^2, h = 3 + 3 chi + chi^2 and xi -> -i w on the real
/// axis. With FreeSpacePart::imaginary_only only i*Im G is returned, which
/// stays finite at coincident points: Im G(r, r, w) = (w / 6 pi) I.
/// Throws DomainError for coincident points unless the imaginary part alone is
/// requested at real frequency.
DyadicTensor greens_free(const Vec3& r1, const Vec3& r2, Frequency freq,
                         FreeSpacePart part = FreeSpacePart::full);

/// Scattering tensor of the half-space at imaginary frequency xi > 0 (single
/// k_parallel integral with Bessel kernels J0, J1, J2 and weight e^{-kappa Z}).
DyadicTensor greens_scatter_imag(const Vec3& r1, const Vec3& r2, double xi, const Medium& medium,
                                 const QuadratureSpec& quad, TensorEntries entries = TensorEntries::all);

/// Scattering tensor at real frequency w > 0, split into the propagating
/// sector k_perp in [0, w] (phase e^{i k_perp Z}) and the evanescent sector
/// kappa in [0, inf) (weight e^{-kappa Z}).
DyadicTensor greens_scatter_real(const Vec3& r1, const Vec3& r2, double w, const Medium& medium,
                                 const QuadratureSpec& quad, TensorEntries entries = TensorEntries::all);

/// dG_sc/dZ, Z = z1 + z2, at fixed lateral separation, at real or imaginary
/// frequency. Computed by differentiating under the integral sign.
DyadicTensor greens_scatter_dz(const Vec3& r1, const Vec3& r2, Frequency freq, const Medium& medium,
                               const QuadratureSpec& quad, TensorEntries entries = TensorEntries::all);

/// Value and Z-derivative from one quadrature pass.
struct ScatterPair {
  DyadicTensor value;
  DyadicTensor d_dz;
};
ScatterPair greens_scatter_with_dz(const Vec3& r1, const Vec3& r2, Frequency freq, const Medium& medium,
                                   const QuadratureSpec& quad, TensorEntries entries = TensorEntries::all);

/// d1^* . G . d2
complex dipole_projection(const DyadicTensor& g, const Eigen::Vector3cd& d1, const Eigen::Vector3cd& d2);

}  // namespace cpforce
