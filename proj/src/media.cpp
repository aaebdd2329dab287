#include "cpforce/media.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cpforce/error.hpp"

namespace cpforce {

Medium Medium::drude(double plasma_frequency, double loss_rate, double permeability) {
  if (!(plasma_frequency > 0.0) || !std::isfinite(plasma_frequency))
    throw ConfigError("Drude plasma frequency must be positive and finite");
  if (!(loss_rate >= 0.0) || !std::isfinite(loss_rate))
    throw ConfigError("Drude loss rate must be non-negative and finite");
  if (!(permeability > 0.0)) throw ConfigError("permeability must be positive");
  Medium m;
  m.model_ = Model::drude;
  m.plasma_frequency_ = plasma_frequency;
  m.loss_rate_ = loss_rate;
  m.mu_ = permeability;
  return m;
}

Medium Medium::vacuum() { return Medium{}; }

Medium Medium::perfect_conductor() {
  Medium m;
  m.model_ = Model::perfect_conductor;
  return m;
}

Medium Medium::scaled(double unit) const {
  if (!(unit > 0.0)) throw ConfigError("frequency unit must be positive");
  Medium m = *this;
  m.plasma_frequency_ /= unit;
  m.loss_rate_ /= unit;
  return m;
}

complex permittivity(const Medium& medium, Frequency freq) {
  if (freq.is_real() && freq.value == 0.0)
    throw DomainError("permittivity: w = 0 on the real axis is a pole of the Drude model");
  if (freq.is_imaginary() && freq.value < 0.0)
    throw DomainError("permittivity: imaginary frequency xi must be >= 0");

  switch (medium.model()) {
    case Medium::Model::vacuum:
      return 1.0;
    case Medium::Model::perfect_conductor:
      return std::numeric_limits<double>::infinity();
    case Medium::Model::drude:
      break;
  }

  const double wp2 = medium.plasma_frequency() * medium.plasma_frequency();
  const double gamma = medium.loss_rate();
  if (freq.is_imaginary()) {
    const double xi = freq.value;
    if (xi == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 + wp2 / (xi * xi + xi * gamma);
  }
  const double w = freq.value;
  return 1.0 - wp2 / complex(w * w, w * gamma);
}

complex permeability(const Medium& medium, Frequency) { return medium.permeability(); }

namespace {

complex medium_root(complex radicand) {
  if (radicand.imag() == 0.0 && radicand.real() < 0.0) return complex(0.0, -std::sqrt(-radicand.real()));
  return std::sqrt(radicand);  // principal branch, Re >= 0
}

}  // namespace

FresnelPair fresnel(const Medium& medium, complex kappa, Frequency freq) {
  FresnelPair out{0.0, 0.0, kappa, freq};
  switch (medium.model()) {
    case Medium::Model::vacuum:
      return out;
    case Medium::Model::perfect_conductor:
      out.r_p = 1.0;
      out.r_s = -1.0;
      return out;
    case Medium::Model::drude:
      break;
  }
  if (freq.is_imaginary() && (kappa.imag() != 0.0 || kappa.real() < 0.0))
    throw DomainError("fresnel: kappa must be real and non-negative on the imaginary axis");

  const complex eps = permittivity(medium, freq);
  const complex mu = permeability(medium, freq);
  // (xi/c)^2 on the imaginary axis, -(w/c)^2 on the real axis.
  const double xi2 = -freq.k_squared();
  const complex root = medium_root((eps * mu - 1.0) * xi2 + kappa * kappa);
  out.r_p = (eps * kappa - root) / (eps * kappa + root);
  out.r_s = (mu * kappa - root) / (mu * kappa + root);
  return out;
}

complex image_factor(const Medium& medium, Frequency freq, double pole_guard) {
  switch (medium.model()) {
    case Medium::Model::vacuum:
      return 0.0;
    case Medium::Model::perfect_conductor:
      return 1.0;
    case Medium::Model::drude:
      break;
  }
  const complex eps = permittivity(medium, freq);
  if (std::abs(eps + 1.0) < pole_guard)
    throw ResonanceError("surface plasmon pole: eps(w) = -1 makes the near-field image factor diverge");
  return (eps - 1.0) / (eps + 1.0);
}

}  // namespace cpforce
