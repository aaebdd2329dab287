#include "cpforce/dicke.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cpforce/error.hpp"

namespace cpforce {

namespace {

void check_emitters(int n) {
  if (n < 1 || n > kMaxEmitters)
    throw DomainError("emitter count must be in [1, " + std::to_string(kMaxEmitters) + "], got " + std::to_string(n));
}

int emitters_for_dim(Eigen::Index dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0) throw DomainError("state dimension must be a power of two >= 2");
  const int n = std::countr_zero(static_cast<std::uint64_t>(dim));
  check_emitters(n);
  return n;
}

SparseOp lowering(int n_emitters, int emitter) {
  const Eigen::Index dim = Eigen::Index(1) << n_emitters;
  const std::uint32_t b = basis::bit(n_emitters, emitter);
  std::vector<Eigen::Triplet<complex>> t;
  t.reserve(dim / 2);
  for (std::uint32_t i = 0; i < dim; ++i)
    if (i & b) t.emplace_back(i & ~b, i, 1.0);
  SparseOp op(dim, dim);
  op.setFromTriplets(t.begin(), t.end());
  return op;
}

// Indices of product states with exactly k excitations, ascending.
std::vector<std::uint32_t> sector(int n_emitters, int k) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < (1u << n_emitters); ++i)
    if (basis::excitations(i) == k) out.push_back(i);
  return out;
}

// <sigma_m^- sigma_n^+> = sum_i conj(psi[i]) psi[j] over i with m lowered and n raised from j.
complex lowered_raised(const QuantumState& s, int m, int n) {
  const int N = s.emitters();
  const std::uint32_t bm = basis::bit(N, m), bn = basis::bit(N, n);
  complex acc = 0.0;
  const std::uint32_t dim = static_cast<std::uint32_t>(s.dim());
  if (s.is_pure()) {
    const StateVector& psi = s.amplitudes();
    for (std::uint32_t j = 0; j < dim; ++j) {
      if (!(j & bm) || (j & bn)) continue;
      const std::uint32_t i = (j & ~bm) | bn;
      acc += std::conj(psi[i]) * psi[j];
    }
    return acc;
  }
  const DensityMatrix rho = s.density();
  for (std::uint32_t j = 0; j < dim; ++j) {
    if (!(j & bm) || (j & bn)) continue;
    const std::uint32_t i = (j & ~bm) | bn;
    acc += rho(j, i);
  }
  return acc;
}

}  // namespace

int basis::excitations(std::uint32_t index) { return std::popcount(index); }

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long long subradiant_degeneracy(int n_emitters) {
  if (n_emitters < 2 || n_emitters % 2 != 0) throw DomainError("subradiant J = 0 sector needs an even emitter count");
  const int h = n_emitters / 2;
  return binomial(n_emitters, h) - binomial(n_emitters, h - 1);
}

QuantumState QuantumState::pure(StateVector amplitudes) {
  QuantumState s;
  s.n_ = emitters_for_dim(amplitudes.size());
  s.data_ = std::move(amplitudes);
  return s;
}

QuantumState QuantumState::mixed(DensityMatrix rho) {
  if (rho.rows() != rho.cols()) throw DomainError("density matrix must be square");
  QuantumState s;
  s.n_ = emitters_for_dim(rho.rows());
  s.data_ = std::move(rho);
  return s;
}

Eigen::Index QuantumState::dim() const { return Eigen::Index(1) << n_; }

const StateVector& QuantumState::amplitudes() const {
  if (!is_pure()) throw DomainError("state is mixed; no amplitude vector");
  return std::get<StateVector>(data_);
}

DensityMatrix QuantumState::density() const {
  if (is_pure()) {
    const StateVector& v = std::get<StateVector>(data_);
    return v * v.adjoint();
  }
  return std::get<DensityMatrix>(data_);
}

complex QuantumState::expectation(const SparseOp& op) const {
  if (op.rows() != dim()) throw DomainError("operator and state dimensions differ");
  if (is_pure()) {
    const StateVector& v = std::get<StateVector>(data_);
    return v.dot(op * v);
  }
  const DensityMatrix& rho = std::get<DensityMatrix>(data_);
  complex tr = 0.0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseOp::InnerIterator it(op, k); it; ++it) tr += it.value() * rho(it.col(), it.row());
  return tr;
}

void QuantumState::validate() const {
  if (is_pure()) {
    const double norm = std::get<StateVector>(data_).norm();
    if (!(std::abs(norm - 1.0) <= 1e-12)) throw DomainError("state vector norm deviates from 1 by more than 1e-12");
    return;
  }
  const DensityMatrix& rho = std::get<DensityMatrix>(data_);
  if (!(std::abs(rho.trace() - 1.0) <= 1e-12)) throw DomainError("density matrix trace deviates from 1 by more than 1e-12");
  if (!((rho - rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12)) throw DomainError("density matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<DensityMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() >= -1e-10)) throw DomainError("density matrix has a negative eigenvalue");
}

SpinOps::SpinOps(int n_emitters) : n(n_emitters) {
  check_emitters(n_emitters);
  const Eigen::Index dim = Eigen::Index(1) << n;
  j_minus = SparseOp(dim, dim);
  jz = SparseOp(dim, dim);
  for (int e = 0; e < n; ++e) {
    sigma_minus.push_back(lowering(n, e));
    sigma_plus.push_back(SparseOp(sigma_minus.back().adjoint()));
    j_minus += sigma_minus.back();
  }
  j_plus = SparseOp(j_minus.adjoint());
  std::vector<Eigen::Triplet<complex>> t;
  for (std::uint32_t i = 0; i < dim; ++i) t.emplace_back(i, i, basis::excitations(i) - 0.5 * n);
  jz.setFromTriplets(t.begin(), t.end());
  jx = 0.5 * (j_plus + j_minus);
  jy = complex(0.0, -0.5) * (j_plus - j_minus);
}

SparseOp SpinOps::j_squared() const {
  return SparseOp(jx * jx) + SparseOp(jy * jy) + SparseOp(jz * jz);
}

QuantumState product_state(int n_emitters, std::uint32_t excited_mask) {
  check_emitters(n_emitters);
  const Eigen::Index dim = Eigen::Index(1) << n_emitters;
  if (excited_mask >= dim) throw DomainError("excitation mask exceeds the emitter count");
  StateVector v = StateVector::Zero(dim);
  v[excited_mask] = 1.0;
  return QuantumState::pure(std::move(v));
}

QuantumState ground_state(int n_emitters) { return product_state(n_emitters, 0); }

QuantumState excited_state(int n_emitters) {
  check_emitters(n_emitters);
  return product_state(n_emitters, (1u << n_emitters) - 1);
}

QuantumState dicke_state(int n_emitters, double j, double m) {
  check_emitters(n_emitters);
  if (2.0 * j != n_emitters)
    throw DomainError("dicke_state builds the symmetric ladder J = N/2 only; use subradiant_basis for J = 0");
  const double k = m + j;
  if (std::abs(m) > j || k != std::round(k)) throw DomainError("dicke_state needs |M| <= J with J - M integer");
  const auto idx = sector(n_emitters, static_cast<int>(k));
  StateVector v = StateVector::Zero(Eigen::Index(1) << n_emitters);
  const double a = 1.0 / std::sqrt(static_cast<double>(idx.size()));
  for (auto i : idx) v[i] = a;
  return QuantumState::pure(std::move(v));
}

QuantumState single_excitation_state(double theta, double phi) {
  StateVector v = StateVector::Zero(4);
  v[0b10] = std::cos(theta);
  v[0b01] = std::polar(std::sin(theta), phi);
  return QuantumState::pure(std::move(v));
}

QuantumState superradiant_pair() { return single_excitation_state(pi / 4.0, 0.0); }
QuantumState subradiant_pair() { return single_excitation_state(pi / 4.0, pi); }

double pair_correlator(const QuantumState& state, int m, int n) {
  const int N = state.emitters();
  if (m == n) throw DomainError("pair_correlator needs two distinct emitters");
  if (m < 0 || n < 0 || m >= N || n >= N) throw DomainError("pair_correlator emitter index out of range");
  return 2.0 * lowered_raised(state, m, n).real();
}

double excited_population(const QuantumState& state, int n) {
  const int N = state.emitters();
  if (n < 0 || n >= N) throw DomainError("excited_population emitter index out of range");
  const std::uint32_t b = basis::bit(N, n);
  double p = 0.0;
  if (state.is_pure()) {
    const StateVector& v = state.amplitudes();
    for (std::uint32_t i = 0; i < v.size(); ++i)
      if (i & b) p += std::norm(v[i]);
    return p;
  }
  const DensityMatrix rho = state.density();
  for (std::uint32_t i = 0; i < rho.rows(); ++i)
    if (i & b) p += rho(i, i).real();
  return p;
}

std::vector<QuantumState> subradiant_basis(int n_emitters) {
  const long long dg = subradiant_degeneracy(n_emitters);
  check_emitters(n_emitters);
  const int h = n_emitters / 2;
  const auto zero = sector(n_emitters, h);
  const auto lower = sector(n_emitters, h - 1);

  // J^- restricted to M = 0 -> M = -1.
  Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(lower.size(), zero.size());
  for (std::size_t c = 0; c < zero.size(); ++c)
    for (int e = 0; e < n_emitters; ++e) {
      const std::uint32_t b = basis::bit(n_emitters, e);
      if (!(zero[c] & b)) continue;
      const auto it = std::lower_bound(lower.begin(), lower.end(), zero[c] & ~b);
      jm(it - lower.begin(), c) = 1.0;
    }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jm, Eigen::ComputeFullV);
  const Eigen::MatrixXd kernel = svd.matrixV().rightCols(dg);

  // Gauge: project product states in basis order onto the kernel and orthonormalize.
  std::vector<Eigen::VectorXd> picked;
  const Eigen::MatrixXd proj = kernel * kernel.transpose();
  for (std::size_t c = 0; c < zero.size() && static_cast<long long>(picked.size()) < dg; ++c) {
    Eigen::VectorXd v = proj.col(c);
    for (const auto& p : picked) v -= p.dot(v) * p;
    for (const auto& p : picked) v -= p.dot(v) * p;
    const double nv = v.norm();
    if (nv < 1e-8) continue;
    v /= nv;
    // First nonzero amplitude positive.
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (std::abs(v[i]) > 1e-12) {
        if (v[i] < 0) v = -v;
        break;
      }
    picked.push_back(v);
  }
  if (static_cast<long long>(picked.size()) != dg) throw NumericalError("subradiant kernel has the wrong dimension");

  std::vector<QuantumState> out;
  for (const auto& p : picked) {
    StateVector v = StateVector::Zero(Eigen::Index(1) << n_emitters);
    for (std::size_t c = 0; c < zero.size(); ++c) v[zero[c]] = p[c];
    out.push_back(QuantumState::pure(std::move(v)));
  }
  return out;
}

}  // namespace cpforce
