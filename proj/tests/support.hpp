#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cpforce/coeffs.hpp"
#include "cpforce/media.hpp"

namespace cpforce::testing {

/// Seeded generator for property tests; every case prints its seed on failure.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  double normal() { return std::normal_distribution<double>()(rng_); }

  /// Drude medium with wp in [2, 8] omega0 and gamma in [1e-3, 0.1] wp, units of omega0.
  Medium drude() {
    const double wp = uniform(2.0, 8.0);
    return Medium::drude(wp, wp * log_uniform(1e-3, 0.1));
  }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

/// Gold (omega_p = 1.36e16, gamma = 1.04e14 rad/s) in units of omega0.
inline Medium gold(const EmitterParams& e) { return Medium::drude(1.36e16, 1.04e14).scaled(e.omega0); }

inline EmitterParams emitter_700nm() { return EmitterParams::from_wavelength_lifetime(700e-9, 26e-9); }

}  // namespace cpforce::testing
