#pragma once

#include <string>
#include <vector>

#include "cpforce/coeffs.hpp"
#include "cpforce/dynamics.hpp"
#include "cpforce/forces.hpp"

namespace cpforce {

/// Every CSV starts with "# config_hash=<hash> schema=<name>" followed by a
/// header row. Numbers are printed with %.9g, so equal inputs give equal bytes.
inline constexpr const char* kForceMapSchema = "cpforce.force_map.v1";
inline constexpr const char* kForceSeriesSchema = "cpforce.force_series.v1";
inline constexpr const char* kSubradiantSchema = "cpforce.subradiant.v1";

/// x0_k0, z0_k0, F_g, F_e, F_sup, F_sub, F_inf, Gam_sup, Gam_sub, Gam_nn, quad_err_flag.
std::string force_map_csv(const ForceMap& map, const std::string& hash);

/// t_s, t_gamma0, F_total_natural, F_total_N, boost_N, excitation, trace_err.
/// boost_N is zero when the series carries no reference.
std::string force_series_csv(const ForceSeries& series, const EmitterParams& emitter, const std::string& hash);

struct SubradiantRow {
  double x0 = 0.0, z0 = 0.0;
  double F_g = 0.0, F_e = 0.0;
  std::vector<double> forces;  ///< one per subradiant basis state
};

/// x0_k0, z0_k0, F_g, F_e, F_sr_1 .. F_sr_d.
std::string subradiant_csv(const std::vector<SubradiantRow>& rows, const std::string& hash);

/// Coupling report (all natural units) with quadrature error and Gamma spectrum.
std::string couplings_json(const CouplingSet& c, const EmitterParams& emitter, const std::string& hash);

/// Provenance sidecar: hash, command, the canonical INI text, and summary fields.
std::string sidecar_json(const std::string& command, const std::string& hash, const std::string& ini,
                         const std::string& summary_json = "{}");

/// Failed map cells as a JSON array of {index, x0_k0, z0_k0, message}.
std::string failures_json(const ForceMap& map, const std::string& hash);

/// Writes `text` to `path`, creating parent directories. Throws ConfigError
/// when the location is not writable.
void write_file(const std::string& path, const std::string& text);

}  // namespace cpforce
