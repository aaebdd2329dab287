#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cpforce/units.hpp"

namespace cpforce {

/// Largest chain handled by the state and dynamics code (2^12 = 4096 amplitudes).
inline constexpr int kMaxEmitters = 12;

using StateVector = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;
using SparseOp = Eigen::SparseMatrix<complex>;

/// Product basis over N two-level emitters: emitter 0 (the first emitter of
/// the chain) is the most significant bit, |e> = 1 and |g> = 0.
namespace basis {
inline std::uint32_t bit(int n_emitters, int emitter) { return 1u << (n_emitters - 1 - emitter); }
inline bool excited(std::uint32_t index, int n_emitters, int emitter) {
  return (index & bit(n_emitters, emitter)) != 0;
}
int excitations(std::uint32_t index);
}  // namespace basis

/// Pure state or density matrix over the 2^N product basis.
class QuantumState {
 public:
  static QuantumState pure(StateVector amplitudes);
  static QuantumState mixed(DensityMatrix rho);

  int emitters() const { return n_; }
  Eigen::Index dim() const;
  bool is_pure() const { return std::holds_alternative<StateVector>(data_); }

  const StateVector& amplitudes() const;
  /// rho = |psi><psi| for pure states.
  DensityMatrix density() const;

  /// Tr[op rho] for a sparse operator.
  complex expectation(const SparseOp& op) const;

  /// Checks norm/trace (1e-12), Hermiticity (1e-12) and, for density
  /// matrices, positivity (min eigenvalue >= -1e-10). Throws DomainError.
  void validate() const;

 private:
  QuantumState() = default;
  int n_ = 0;
  std::variant<StateVector, DensityMatrix> data_;
};

/// Per-emitter ladder operators and collective spin operators.
struct SpinOps {
  int n = 0;
  std::vector<SparseOp> sigma_minus, sigma_plus;
  SparseOp jx, jy, jz, j_plus, j_minus;

  explicit SpinOps(int n_emitters);
  /// J^2 = Jx^2 + Jy^2 + Jz^2.
  SparseOp j_squared() const;
};

QuantumState product_state(int n_emitters, std::uint32_t excited_mask);
QuantumState ground_state(int n_emitters);
QuantumState excited_state(int n_emitters);

/// Symmetric Dicke state |J = N/2, M>: equal superposition of the
/// C(N, M + N/2) product states with M + N/2 excitations.
/// Throws DomainError unless 2J = N, |M| <= J and J - M is an integer.
QuantumState dicke_state(int n_emitters, double j, double m);

/// cos(theta)|eg> + e^{i phi} sin(theta)|ge> for two emitters.
QuantumState single_excitation_state(double theta, double phi);
QuantumState superradiant_pair();
QuantumState subradiant_pair();

/// <sigma_m^- sigma_n^+ + sigma_n^- sigma_m^+>, m != n.
double pair_correlator(const QuantumState& state, int m, int n);

/// <sigma_n^+ sigma_n^-> (excited-state population of emitter n).
double excited_population(const QuantumState& state, int n);

/// Orthonormal basis of the J = 0 (subradiant) sector for even N <= 12:
/// the kernel of J^- on the M = 0 block, found by SVD and then fixed to a
/// reproducible gauge by Gram-Schmidt over projected product states in
/// basis order. Size N! / ((N/2 + 1)! (N/2)!).
std::vector<QuantumState> subradiant_basis(int n_emitters);

/// N! / ((N/2 + 1)! (N/2)!) for even N.
long long subradiant_degeneracy(int n_emitters);

long long binomial(int n, int k);

}  // namespace cpforce
