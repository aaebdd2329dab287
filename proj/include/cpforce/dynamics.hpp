#pragma once

#include <optional>
#include <vector>

#include "cpforce/coeffs.hpp"
#include "cpforce/dicke.hpp"

namespace cpforce {

enum class Integrator {
  /// Fourth-order exponential Runge-Kutta (Cox-Matthews) on excitation-number
  /// blocks, in the eigenbasis of each block's effective Hamiltonian
  /// H - (i/2) sum Gamma_mn s+_m s-_n. Coherent evolution and decay are exact;
  /// only the jump term feeding a block from the one above is stepped.
  exponential,
  /// Classical RK4 on the full product-basis density matrix. Step limited by
  /// the Hamiltonian spectral width; for small N and moderate couplings.
  rk4,
};

struct EvolutionSpec {
  double t_end = 1.0;   ///< units 1/Gamma0
  /// Units 1/Gamma0, used as given when positive. 0 selects 0.025 / Gamma_max,
  /// further capped for rk4 at 0.1 over the Hamiltonian spectral width.
  double step = 0.0;
  int samples = 400;    ///< output points after t = 0 (the step count is rounded up to a multiple)
  Integrator integrator = Integrator::exponential;
  bool keep_final_state = false;

  /// h Gamma_max < 0.1, t_end > 0, samples >= 1. Throws ConfigError.
  void validate(double gamma_max) const;
  /// Step actually used for a coupling set (before rounding to the grid).
  double resolved_step(const CouplingSet& c) const;
};

struct ForceSeries {
  std::vector<double> t;           ///< units 1/Gamma0
  std::vector<double> force;       ///< F_CP[rho(t)], units hbar Gamma0 k0
  std::vector<double> reference;   ///< incoherent reference force (empty unless computed)
  std::vector<double> excitation;  ///< <sum_n s+_n s-_n>
  std::vector<double> trace_err;   ///< |Tr rho - 1|
  std::vector<double> hermiticity_err;
  std::vector<double> min_eigenvalue;
  double step = 0.0;
  std::optional<DensityMatrix> final_state;

  /// force - reference at every sample (reference must be present).
  std::vector<double> boost() const;
  /// Sample index of the largest |boost|.
  std::size_t peak_index() const;
  double max_trace_err() const;
  double max_hermiticity_err() const;
  double min_min_eigenvalue() const;
};

/// Born-Markov master equation
///   d rho/dt = -i[H, rho] + sum_mn Gamma_mn (s-_n rho s+_m - {s+_m s-_n, rho}/2),
///   H = sum_n (Omega+_n s+s- + Omega-_n s-s+) + sum_{m!=n} Omega_mn s+_m s-_n,
/// with Omega_mn = Omega^free + Omega^sc. Throws DomainError for a non-PSD
/// Gamma matrix or an invalid state, IntegrationError on trace drift above
/// 1e-6 or a non-finite state.
ForceSeries evolve(const QuantumState& rho0, const CouplingSet& c, const EvolutionSpec& spec);


/// Couplings with every m != n entry of Omega, Gamma and their derivatives
/// zeroed: independent emitters with the same surface shifts and rates.
CouplingSet incoherent_reference(const CouplingSet& c);

/// Evolves rho0 under the full and the incoherent-reference couplings on the
/// same time grid and stores the reference force.
ForceSeries boost_series(const QuantumState& rho0, const CouplingSet& c, const EvolutionSpec& spec);

/// Evolves the all-excited chain under the full and the incoherent-reference
/// couplings on the same time grid; boost() is the difference.
ForceSeries superradiant_boost(const CouplingSet& c, const EvolutionSpec& spec);

}  // namespace cpforce
