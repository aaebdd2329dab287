#include "cpforce/dynamics.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <memory>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/Eigenvalues>

#include "cpforce/error.hpp"
#include "cpforce/forces.hpp"

namespace cpforce {

namespace {

using Mat = Eigen::MatrixXcd;
using Arr = Eigen::ArrayXXcd;

// A set of product states with a global -> local lookup and, for every
// member, the emitters that can be raised and where that lands in `up`.
struct Space {
  std::vector<std::uint32_t> states;
  std::vector<int> local;
  std::vector<std::vector<std::pair<int, int>>> raises;
  Eigen::Index size() const { return static_cast<Eigen::Index>(states.size()); }
};

Space make_space(int n, std::vector<std::uint32_t> states) {
  Space s;
  s.states = std::move(states);
  s.local.assign(std::size_t(1) << n, -1);
  for (std::size_t i = 0; i < s.states.size(); ++i) s.local[s.states[i]] = static_cast<int>(i);
  return s;
}

void link_raises(int n, Space& s, const Space& up) {
  s.raises.assign(s.states.size(), {});
  for (std::size_t i = 0; i < s.states.size(); ++i)
    for (int e = 0; e < n; ++e) {
      const std::uint32_t b = basis::bit(n, e);
      if (s.states[i] & b) continue;
      const int r = up.local[s.states[i] | b];
      if (r >= 0) s.raises[i].emplace_back(e, r);
    }
}

// sum_nm Gamma_nm s-_n X s+_m, X indexed by the raised spaces of rows/cols.
Mat jump(const Mat& X, const Space& rows, const Space& cols, const Eigen::MatrixXd& gamma) {
  const int n = static_cast<int>(gamma.rows());
  // s[e](:, j) = sum over raises (m, rb) of column j of Gamma(e, m) X(:, rb).
  std::vector<Mat> s(n, Mat::Zero(X.rows(), cols.size()));
  for (Eigen::Index j = 0; j < cols.size(); ++j)
    for (auto [m, rb] : cols.raises[j])
      for (int e = 0; e < n; ++e)
        if (gamma(e, m) != 0.0) s[e].col(j) += gamma(e, m) * X.col(rb);
  Mat out = Mat::Zero(rows.size(), cols.size());
  for (Eigen::Index j = 0; j < cols.size(); ++j)
    for (Eigen::Index i = 0; i < rows.size(); ++i) {
      complex acc = 0.0;
      for (auto [e, ra] : rows.raises[i]) acc += s[e](ra, j);
      out(i, j) = acc;
    }
  return out;
}

// Hamiltonian and G = sum Gamma_mn s+_m s-_n restricted to a space closed
// under excitation-preserving hops.
void block_operators(int n, const Space& s, const CouplingSet& c, Eigen::MatrixXd& h, Eigen::MatrixXd& g) {
  const Eigen::MatrixXd om = c.omega_dd();
  const Eigen::MatrixXd gam = c.gamma();
  h = Eigen::MatrixXd::Zero(s.size(), s.size());
  g = Eigen::MatrixXd::Zero(s.size(), s.size());
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const std::uint32_t gj = s.states[j];
    for (int e = 0; e < n; ++e) {
      const bool up = basis::excited(gj, n, e);
      h(j, j) += up ? c.omega_plus[e] : c.omega_minus[e];
      if (!up) continue;
      g(j, j) += gam(e, e);
      for (int m = 0; m < n; ++m) {
        if (m == e || basis::excited(gj, n, m)) continue;
        const int i = s.local[gj ^ basis::bit(n, e) ^ basis::bit(n, m)];
        h(i, j) += om(m, e);
        g(i, j) += gam(m, e);
      }
    }
  }
}

complex phi_taylor(int k, complex z) {
  complex sum = 0.0, term = 1.0;
  for (int j = 1; j <= k; ++j) term /= double(j);
  for (int j = 0; j < 30; ++j) {
    sum += term;
    term *= z / double(j + k + 1);
  }
  return sum;
}

// phi_1..phi_3 at z.
std::array<complex, 3> phis(complex z) {
  if (std::abs(z) < 1.0) return {phi_taylor(1, z), phi_taylor(2, z), phi_taylor(3, z)};
  const complex ez = std::exp(z);
  const complex p1 = (ez - 1.0) / z;
  const complex p2 = (p1 - 1.0) / z;
  const complex p3 = (p2 - 0.5) / z;
  return {p1, p2, p3};
}

struct Observables {
  Eigen::VectorXd pops;
  Eigen::MatrixXd corr;
  double trace = 0.0, herm = 0.0, min_eig = 0.0;
};

void accumulate_moments(int n, const Space& s, const Mat& rho, Observables& o) {
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const std::uint32_t gj = s.states[j];
    const double p = rho(j, j).real();
    o.trace += p;
    for (int e = 0; e < n; ++e)
      if (basis::excited(gj, n, e)) o.pops[e] += p;
    for (int m = 0; m < n; ++m) {
      if (!basis::excited(gj, n, m)) continue;
      for (int k = 0; k < n; ++k) {
        if (basis::excited(gj, n, k)) continue;
        const int i = s.local[(gj & ~basis::bit(n, m)) | basis::bit(n, k)];
        o.corr(m, k) += 2.0 * rho(j, i).real();
      }
    }
  }
}

double min_eigenvalue(const Mat& rho) {
  if (rho.rows() == 0) return 0.0;
  const Mat herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

class Engine {
 public:
  virtual ~Engine() = default;
  virtual void step() = 0;
  virtual Observables observe() const = 0;
  virtual DensityMatrix assemble() const = 0;
};

class BlockEngine final : public Engine {
 public:
  BlockEngine(const CouplingSet& c, const DensityMatrix& rho0, double h) : n_(c.size()), gamma_(c.gamma()) {
    sectors_.resize(n_ + 1);
    for (int k = 0; k <= n_; ++k) {
      std::vector<std::uint32_t> st;
      for (std::uint32_t i = 0; i < (1u << n_); ++i)
        if (basis::excitations(i) == k) st.push_back(i);
      sectors_[k].space = make_space(n_, std::move(st));
    }
    for (int k = 0; k < n_; ++k) link_raises(n_, sectors_[k].space, sectors_[k + 1].space);
    sectors_[n_].space.raises.assign(1, {});

    for (auto& sec : sectors_) {
      Eigen::MatrixXd hm, gm;
      block_operators(n_, sec.space, c, hm, gm);
      const Mat heff = hm.cast<complex>() - complex(0.0, 0.5) * gm.cast<complex>();
      sec.identity = (heff - Mat(heff.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
      if (sec.identity) {
        sec.lambda = heff.diagonal();
        continue;
      }
      Eigen::ComplexEigenSolver<Mat> es(heff);
      if (es.info() != Eigen::Success) throw IntegrationError("effective Hamiltonian diagonalisation failed");
      sec.lambda = es.eigenvalues();
      sec.u = es.eigenvectors();
      sec.uinv = sec.u.inverse();
      if (!sec.uinv.allFinite()) throw IntegrationError("effective Hamiltonian is defective");
    }

    // Tracked blocks (k, l), k >= l: for each excitation difference present
    // in rho0, all blocks at or below the highest nonzero one.
    std::map<int, int> top;
    for (int k = 0; k <= n_; ++k)
      for (int l = 0; l <= k; ++l) {
        if (rows_of(rho0, k, l).cwiseAbs().maxCoeff() == 0.0) continue;
        auto& t = top[k - l];
        t = std::max(t, k);
      }
    std::map<std::pair<int, int>, int> id;
    for (auto [d, kmax] : top)
      for (int k = d; k <= kmax; ++k) {
        id[{k, k - d}] = static_cast<int>(blocks_.size());
        blocks_.push_back(Block{k, k - d, -1, {}, {}, {}, {}, {}, {}});
      }
    for (auto& b : blocks_) {
      auto it = id.find({b.k + 1, b.l + 1});
      b.up = it == id.end() ? -1 : it->second;
      const auto& lk = sectors_[b.k].lambda;
      const auto& ll = sectors_[b.l].lambda;
      const Eigen::Index r = sectors_[b.k].space.size(), q = sectors_[b.l].space.size();
      b.e_half.resize(r, q);
      b.p_half.resize(r, q);
      b.e_full.resize(r, q);
      b.c1.resize(r, q);
      b.c2.resize(r, q);
      b.c3.resize(r, q);
      for (Eigen::Index j = 0; j < q; ++j)
        for (Eigen::Index i = 0; i < r; ++i) {
          const complex mu = complex(0.0, -1.0) * (lk[i] - std::conj(ll[j]));
          const complex zh = 0.5 * h * mu, z = h * mu;
          const auto ph = phis(zh);
          const auto pf = phis(z);
          b.e_half(i, j) = std::exp(zh);
          b.p_half(i, j) = 0.5 * h * ph[0];
          b.e_full(i, j) = std::exp(z);
          b.c1(i, j) = h * (pf[0] - 3.0 * pf[1] + 4.0 * pf[2]);
          b.c2(i, j) = h * 2.0 * (pf[1] - 2.0 * pf[2]);
          b.c3(i, j) = h * (4.0 * pf[2] - pf[1]);
        }
      y_.push_back(to_eigen(rows_of(rho0, b.k, b.l), b.k, b.l));
    }
    full_diagonal_only_ = top.size() == 1 && top.begin()->first == 0;
  }

  void step() override {
    const std::size_t nb = blocks_.size();
    rhs(y_, nu_);
    a_.resize(nb);
    for (std::size_t i = 0; i < nb; ++i) a_[i] = (blocks_[i].e_half * y_[i].array() + blocks_[i].p_half * nu_[i].array()).matrix();
    rhs(a_, na_);
    b_.resize(nb);
    for (std::size_t i = 0; i < nb; ++i) b_[i] = (blocks_[i].e_half * y_[i].array() + blocks_[i].p_half * na_[i].array()).matrix();
    rhs(b_, nbb_);
    c_.resize(nb);
    for (std::size_t i = 0; i < nb; ++i)
      c_[i] = (blocks_[i].e_half * a_[i].array() + blocks_[i].p_half * (2.0 * nbb_[i].array() - nu_[i].array())).matrix();
    rhs(c_, nc_);
    for (std::size_t i = 0; i < nb; ++i) {
      const Block& b = blocks_[i];
      y_[i] = (b.e_full * y_[i].array() + b.c1 * nu_[i].array() + b.c2 * (na_[i].array() + nbb_[i].array()) +
               b.c3 * nc_[i].array())
                  .matrix();
    }
  }

  Observables observe() const override {
    Observables o;
    o.pops = Eigen::VectorXd::Zero(n_);
    o.corr = Eigen::MatrixXd::Zero(n_, n_);
    o.min_eig = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const Block& b = blocks_[i];
      if (b.k != b.l) continue;
      const Mat rho = to_product(y_[i], b.k, b.l);
      accumulate_moments(n_, sectors_[b.k].space, rho, o);
      o.herm = std::max(o.herm, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
      if (full_diagonal_only_) o.min_eig = std::min(o.min_eig, min_eigenvalue(rho));
    }
    if (!full_diagonal_only_) o.min_eig = min_eigenvalue(assemble());
    if (!std::isfinite(o.min_eig)) o.min_eig = 0.0;
    for (int m = 0; m < n_; ++m)
      for (int k = 0; k < m; ++k) o.corr(m, k) = o.corr(k, m) = 0.5 * (o.corr(m, k) + o.corr(k, m));
    return o;
  }

  DensityMatrix assemble() const override {
    DensityMatrix rho = DensityMatrix::Zero(Eigen::Index(1) << n_, Eigen::Index(1) << n_);
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const Block& b = blocks_[i];
      const Mat x = to_product(y_[i], b.k, b.l);
      const auto& rs = sectors_[b.k].space.states;
      const auto& cs = sectors_[b.l].space.states;
      for (std::size_t c = 0; c < cs.size(); ++c)
        for (std::size_t r = 0; r < rs.size(); ++r) {
          rho(rs[r], cs[c]) = x(r, c);
          if (b.k != b.l) rho(cs[c], rs[r]) = std::conj(x(r, c));
        }
    }
    return rho;
  }

 private:
  struct Sector {
    Space space;
    Mat u, uinv;  ///< right eigenvectors of H_eff and their inverse
    Eigen::VectorXcd lambda;
    bool identity = false;
  };
  struct Block {
    int k, l;
    int up = -1;
    Arr e_half, p_half, e_full, c1, c2, c3;
  };

  Mat rows_of(const DensityMatrix& rho, int k, int l) const {
    const auto& rs = sectors_[k].space.states;
    const auto& cs = sectors_[l].space.states;
    Mat out(rs.size(), cs.size());
    for (std::size_t c = 0; c < cs.size(); ++c)
      for (std::size_t r = 0; r < rs.size(); ++r) out(r, c) = rho(rs[r], cs[c]);
    return out;
  }

  Mat to_eigen(const Mat& x, int k, int l) const {
    if (sectors_[k].identity && sectors_[l].identity) return x;
    const Sector& sk = sectors_[k];
    const Sector& sl = sectors_[l];
    if (sk.identity) return x * sl.uinv.adjoint();
    if (sl.identity) return sk.uinv * x;
    return sk.uinv * x * sl.uinv.adjoint();
  }
  Mat to_product(const Mat& y, int k, int l) const {
    const Sector& sk = sectors_[k];
    const Sector& sl = sectors_[l];
    if (sk.identity && sl.identity) return y;
    if (sk.identity) return y * sl.u.adjoint();
    if (sl.identity) return sk.u * y;
    return sk.u * y * sl.u.adjoint();
  }

  // Only the jump term; H_eff is integrated exactly by the block factors.
  void rhs(const std::vector<Mat>& y, std::vector<Mat>& out) const {
    out.resize(y.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const Block& b = blocks_[i];
      if (b.up < 0) {
        out[i] = Mat::Zero(y[i].rows(), y[i].cols());
        continue;
      }
      const Mat x = to_product(y[b.up], b.k + 1, b.l + 1);
      out[i] = to_eigen(jump(x, sectors_[b.k].space, sectors_[b.l].space, gamma_), b.k, b.l);
    }
  }

  int n_;
  Eigen::MatrixXd gamma_;
  std::vector<Sector> sectors_;
  std::vector<Block> blocks_;
  bool full_diagonal_only_ = true;
  std::vector<Mat> y_, nu_, na_, nbb_, nc_, a_, b_, c_;
};

class Rk4Engine final : public Engine {
 public:
  Rk4Engine(const CouplingSet& c, const DensityMatrix& rho0, double h) : n_(c.size()), h_(h), gamma_(c.gamma()) {
    std::vector<std::uint32_t> all(std::size_t(1) << n_);
    for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    space_ = make_space(n_, std::move(all));
    link_raises(n_, space_, space_);
    Eigen::MatrixXd hm, gm;
    block_operators(n_, space_, c, hm, gm);
    k_ = (complex(0.0, -1.0) * hm.cast<complex>() - 0.5 * gm.cast<complex>()).sparseView();
    rho_ = rho0;
  }

  static double stable_step(const CouplingSet& c) {
    const int n = c.size();
    std::vector<std::uint32_t> all(std::size_t(1) << n);
    for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    Space s = make_space(n, std::move(all));
    Eigen::MatrixXd hm, gm;
    block_operators(n, s, c, hm, gm);
    const double width = 2.0 * hm.cwiseAbs().rowwise().sum().maxCoeff();
    return width > 0.0 ? 0.1 / width : std::numeric_limits<double>::infinity();
  }

  void step() override {
    const Mat k1 = f(rho_);
    const Mat k2 = f(rho_ + 0.5 * h_ * k1);
    const Mat k3 = f(rho_ + 0.5 * h_ * k2);
    const Mat k4 = f(rho_ + h_ * k3);
    rho_ += h_ / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  Observables observe() const override {
    Observables o;
    o.pops = Eigen::VectorXd::Zero(n_);
    o.corr = Eigen::MatrixXd::Zero(n_, n_);
    accumulate_moments(n_, space_, rho_, o);
    o.herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    o.min_eig = min_eigenvalue(rho_);
    for (int m = 0; m < n_; ++m)
      for (int k = 0; k < m; ++k) o.corr(m, k) = o.corr(k, m) = 0.5 * (o.corr(m, k) + o.corr(k, m));
    return o;
  }

  DensityMatrix assemble() const override { return rho_; }

 private:
  Mat f(const Mat& rho) const {
    const Mat t = k_ * rho;
    return t + t.adjoint() + jump(rho, space_, space_, gamma_);
  }

  int n_;
  double h_;
  Eigen::MatrixXd gamma_;
  Space space_;
  Eigen::SparseMatrix<complex> k_;
  Mat rho_;
};

}  // namespace

void EvolutionSpec::validate(double gamma_max) const {
  if (!(t_end > 0.0)) throw ConfigError("evolution t_end must be > 0");
  if (samples < 1) throw ConfigError("evolution samples must be >= 1");
  if (step < 0.0) throw ConfigError("evolution step must be >= 0 (0 selects the default)");
  if (step > 0.0 && !(step * gamma_max < 0.1)) throw ConfigError("evolution step violates h * Gamma_max < 0.1");
}

double EvolutionSpec::resolved_step(const CouplingSet& c) const {
  const double gmax = c.max_gamma_eigenvalue();
  if (step > 0.0) return std::min(step, t_end);
  double h = 0.025 / gmax;
  if (integrator == Integrator::rk4) h = std::min(h, Rk4Engine::stable_step(c));
  return std::min(h, t_end);
}

std::vector<double> ForceSeries::boost() const {
  if (reference.size() != force.size()) throw DomainError("force series has no incoherent reference");
  std::vector<double> out(force.size());
  for (std::size_t i = 0; i < force.size(); ++i) out[i] = force[i] - reference[i];
  return out;
}

std::size_t ForceSeries::peak_index() const {
  const auto b = boost();
  std::size_t best = 0;
  for (std::size_t i = 1; i < b.size(); ++i)
    if (std::abs(b[i]) > std::abs(b[best])) best = i;
  return best;
}

double ForceSeries::max_trace_err() const { return *std::max_element(trace_err.begin(), trace_err.end()); }
double ForceSeries::max_hermiticity_err() const {
  return *std::max_element(hermiticity_err.begin(), hermiticity_err.end());
}
double ForceSeries::min_min_eigenvalue() const {
  return *std::min_element(min_eigenvalue.begin(), min_eigenvalue.end());
}

ForceSeries evolve(const QuantumState& rho0, const CouplingSet& c, const EvolutionSpec& spec) {
  if (rho0.emitters() != c.size()) throw DomainError("initial state and couplings differ in emitter count");
  rho0.validate();
  require_psd_gamma(c);
  const double gmax = c.max_gamma_eigenvalue();
  spec.validate(gmax);
  if (spec.integrator == Integrator::rk4 && c.size() > 10) throw ConfigError("rk4 integrator is limited to N <= 10");

  const double h_max = spec.resolved_step(c);
  const long long per_sample = std::max(1LL, static_cast<long long>(std::ceil(spec.t_end / spec.samples / h_max)));
  const long long steps = per_sample * spec.samples;
  const double h = spec.t_end / static_cast<double>(steps);

  std::unique_ptr<Engine> eng;
  const DensityMatrix rho = rho0.density();
  if (spec.integrator == Integrator::exponential)
    eng = std::make_unique<BlockEngine>(c, rho, h);
  else
    eng = std::make_unique<Rk4Engine>(c, rho, h);

  ForceSeries out;
  out.step = h;
  auto record = [&](double t) {
    const Observables o = eng->observe();
    out.t.push_back(t);
    out.force.push_back(force_from_moments(c, o.pops, o.corr));
    out.excitation.push_back(o.pops.sum());
    out.trace_err.push_back(std::abs(o.trace - 1.0));
    out.hermiticity_err.push_back(o.herm);
    out.min_eigenvalue.push_back(o.min_eig);
    if (!std::isfinite(out.force.back()) || !std::isfinite(o.trace))
      throw IntegrationError("state became non-finite at t = " + std::to_string(t));
    if (out.trace_err.back() > 1e-6)
      throw IntegrationError("trace drifted by " + std::to_string(out.trace_err.back()) + " at t = " +
                             std::to_string(t) + "; reduce the step");
  };
  record(0.0);
  for (int s = 1; s <= spec.samples; ++s) {
    for (long long i = 0; i < per_sample; ++i) eng->step();
    record(spec.t_end * s / spec.samples);
  }
  if (spec.keep_final_state) out.final_state = eng->assemble();
  return out;
}

CouplingSet incoherent_reference(const CouplingSet& c) {
  CouplingSet r = c;
  auto keep_diag = [](Eigen::MatrixXd& m) { m = Eigen::MatrixXd(m.diagonal().asDiagonal()); };
  keep_diag(r.omega_free);
  keep_diag(r.omega_sc);
  keep_diag(r.gamma_free);
  keep_diag(r.gamma_sc);
  keep_diag(r.d_omega_sc);
  keep_diag(r.d_gamma_sc);
  return r;
}

ForceSeries boost_series(const QuantumState& rho0, const CouplingSet& c, const EvolutionSpec& spec) {
  EvolutionSpec s = spec;
  // The reference runs on the grid of the full problem.
  if (s.step == 0.0) s.step = spec.resolved_step(c);
  ForceSeries full = evolve(rho0, c, s);
  const ForceSeries ref = evolve(rho0, incoherent_reference(c), s);
  full.reference = ref.force;
  return full;
}

ForceSeries superradiant_boost(const CouplingSet& c, const EvolutionSpec& spec) {
  return boost_series(excited_state(c.size()), c, spec);
}

}  // namespace cpforce
