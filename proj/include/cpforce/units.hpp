#pragma once

#include <complex>
#include <numbers>

namespace cpforce {

using complex = std::complex<double>;

/// SI constants (CODATA 2018, exact where defined).
namespace si {
inline constexpr double c = 299792458.0;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double epsilon0 = 8.8541878128e-12;
inline constexpr double mu0 = 1.25663706212e-6;
}  // namespace si

inline constexpr double pi = std::numbers::pi;

/// A frequency argument on either the real or the imaginary axis.
///
/// Inside the numerical core all frequencies are measured in units of the
/// emitter transition frequency omega0, so that the free-space wavenumber at
/// frequency `value` is `value` in units of k0 = omega0 / c.
struct Frequency {
  enum class Axis { real, imaginary };

  double value = 0.0;
  Axis axis = Axis::real;

  static constexpr Frequency real(double w) { return {w, Axis::real}; }
  static constexpr Frequency imaginary(double xi) { return {xi, Axis::imaginary}; }

  constexpr bool is_real() const { return axis == Axis::real; }
  constexpr bool is_imaginary() const { return axis == Axis::imaginary; }

  /// omega^2 / c^2 in units of k0^2: +w^2 on the real axis, -xi^2 on the imaginary axis.
  constexpr double k_squared() const { return is_real() ? value * value : -value * value; }

  /// The complex frequency itself (w or i*xi).
  complex as_complex() const { return is_real() ? complex(value, 0.0) : complex(0.0, value); }
};

}  // namespace cpforce
