#pragma once

#include "cpforce/units.hpp"

namespace cpforce {

/// Dielectric half-space occupying z < 0.
///
/// Frequencies (plasma frequency, loss rate and every evaluation argument)
/// must share one unit; the numerical core uses units of omega0.
class Medium {
 public:
  enum class Model { vacuum, drude, perfect_conductor };

  /// eps(w) = 1 - wp^2 / (w^2 + i w gamma).
  static Medium drude(double plasma_frequency, double loss_rate, double permeability = 1.0);
  static Medium vacuum();
  /// wp -> infinity limit: r_p = 1, r_s = -1 at every argument.
  static Medium perfect_conductor();

  Model model() const { return model_; }
  double plasma_frequency() const { return plasma_frequency_; }
  double loss_rate() const { return loss_rate_; }
  double permeability() const { return mu_; }

  /// The same medium with its frequencies divided by `unit`.
  Medium scaled(double unit) const;

 private:
  Model model_ = Model::vacuum;
  double plasma_frequency_ = 0.0;
  double loss_rate_ = 0.0;
  double mu_ = 1.0;
};

/// Relative permittivity. On the imaginary axis the Drude value
/// 1 + wp^2/(xi^2 + xi gamma) is returned with an exactly zero imaginary part.
/// Throws DomainError for w = 0 on the real axis or xi < 0.
complex permittivity(const Medium& medium, Frequency freq);

/// Relative permeability (a constant; non-magnetic media use 1).
complex permeability(const Medium& medium, Frequency freq);

struct FresnelPair {
  complex r_s;
  complex r_p;
  /// Vacuum-side decay constant the pair was evaluated at, in units of k0.
  complex kappa;
  Frequency freq;
};

/// Planar-interface reflection coefficients for vacuum-side decay constant
/// kappa (units of k0).
///
/// kappa is real and >= 0 for evanescent waves and on the imaginary axis.
/// Propagating waves at real frequency use kappa = -i k_perp with
/// k_perp in [0, w]. The medium-side root sqrt((eps mu - 1) (xi/c)^2 + kappa^2)
/// is taken with non-negative real part, so transmitted fields decay into the
/// medium; a root exactly on the cut (lossless medium, propagating
/// transmission) is taken as -i|.|, i.e. outgoing.
FresnelPair fresnel(const Medium& medium, complex kappa, Frequency freq);

inline FresnelPair fresnel(const Medium& medium, double kappa, Frequency freq) {
  return fresnel(medium, complex(kappa, 0.0), freq);
}

/// Near-field image factor (eps - 1)/(eps + 1) at `freq`; the large-kappa
/// limit of r_p. Throws ResonanceError when eps is within `pole_guard` of -1.
complex image_factor(const Medium& medium, Frequency freq, double pole_guard = 1e-9);

}  // namespace cpforce
