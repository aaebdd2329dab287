#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpforce/coeffs.hpp"
#include "cpforce/dicke.hpp"
#include "cpforce/dynamics.hpp"
#include "cpforce/forces.hpp"
#include "cpforce/media.hpp"
#include "cpforce/quadrature.hpp"

namespace cpforce {

/// Sampled axis: `count` points from min to max, log or linear spacing.
struct AxisSpec {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  bool log = true;

  std::vector<double> values() const;
};

/// Everything a run needs, in the units a user writes (SI lengths and
/// rates, or dimensionless k0-scaled lengths). Optional pairs hold exactly
/// one value after validation.
struct RunConfig {
  // [medium]
  std::string medium_model = "drude";  ///< drude | vacuum | perfect_conductor
  double plasma_frequency = 0.0;       ///< rad/s
  double loss_rate = 0.0;              ///< rad/s

  // [emitter]
  std::optional<double> wavelength;  ///< m
  std::optional<double> omega0;      ///< rad/s
  std::optional<double> gamma0;      ///< 1/s
  std::optional<double> lifetime;    ///< s

  // [geometry]
  int n = 2;
  std::optional<double> x0;     ///< m
  std::optional<double> x0_k0;  ///< k0 x0
  std::optional<double> z0;     ///< m
  std::optional<double> z0_k0;  ///< k0 z0

  QuadratureSpec quad;

  // [evolution]
  std::optional<double> t_end;         ///< s
  std::optional<double> t_end_gamma0;  ///< Gamma0 t
  double step_gamma0 = 0.0;            ///< 0 selects the default
  int samples = 400;
  std::string integrator = "exponential";
  std::string initial_state = "excited";  ///< excited | ground | dicke_m0

  // [map]
  AxisSpec map_x0{1e-4, 10.0, 60, true};
  AxisSpec map_z0{0.01, 0.01, 1, true};

  // [subradiant]
  int sub_n = 6;
  double sub_z0_k0 = 0.1;
  AxisSpec sub_x0{1e-3, 1.0, 30, true};

  // [run]
  int threads = 1;
  std::string out_dir = "out";

  /// Checks shared by every command (medium, emitter, quadrature, run).
  /// Section accessors below check their own keys. All throw ConfigError
  /// naming the offending key.
  void validate() const;

  EmitterParams emitter() const;
  /// Medium scaled to units of omega0.
  Medium medium() const;
  Geometry geometry() const;
  EvolutionSpec evolution() const;
  MapGrid map_grid() const;
  QuantumState initial() const;
  /// x0 sweep of the subradiant command, units 1/k0.
  std::vector<double> subradiant_x0() const;
};

RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Apply "section.key=value"; unknown keys are ConfigErrors.
void apply_setting(RunConfig& cfg, const std::string& assignment);
/// Merge an INI file over `cfg`.
void load_ini(RunConfig& cfg, const std::string& path);
void load_ini_string(RunConfig& cfg, const std::string& text);

/// Canonical INI text: every set field, fixed order, %.17g numbers.
/// load_ini_string(to_ini(c)) reproduces c exactly.
std::string to_ini(const RunConfig& cfg);

/// FNV-1a 64 of to_ini(cfg), as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace cpforce
