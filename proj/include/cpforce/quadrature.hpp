#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cpforce/error.hpp"

namespace cpforce {

/// Accuracy controls shared by every integral in the library.
struct QuadratureSpec {
  double rel_tol = 1e-9;
  /// Absolute floor on the error target (in the integrand's own units).
  double abs_tol = 0.0;
  /// When an integral cancels strongly, the target falls back to
  /// rel_tol * cancellation_floor * integral of |f|.
  double cancellation_floor = 1e-4;
  std::size_t max_subdivisions = 400000;
  /// Semi-infinite tails e^{-v} are cut at v = tail_cutoff (e^-60 ~ 1e-26).
  double tail_cutoff = 60.0;

  /// Same spec with the relative tolerance scaled by `factor`.
  QuadratureSpec tightened(double factor) const {
    QuadratureSpec q = *this;
    q.rel_tol *= factor;
    q.abs_tol *= factor;
    return q;
  }

  void validate() const;
};

template <class V>
struct QuadratureResult {
  V value{};
  double error = 0.0;
  /// Integral of |f|, used to judge cancellation.
  double l1 = 0.0;
  std::size_t evaluations = 0;
  std::size_t panels = 0;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <class V>
auto magnitude(const V& v) -> decltype(v.norm()) {
  return v.norm();
}

template <class V>
V zero_like(const V& v) {
  if constexpr (std::is_arithmetic_v<V>) {
    return V{0};
  } else if constexpr (std::is_same_v<V, std::complex<double>>) {
    return V{0.0, 0.0};
  } else {
    return V(v * 0.0);
  }
}

template <class V>
struct Panel {
  double a, b;
  V value;
  double error;
  double l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

/// One 21-point Gauss-Kronrod panel with the QUADPACK error heuristic.
template <class V, class F>
Panel<V> gk21(F& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  static const auto& xk = GK::abscissa();
  static const auto& wk = GK::weights();
  static const auto& wg = G::weights();

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  std::array<V, 21> fv;
  fv[0] = f(c);
  for (std::size_t i = 1; i < 11; ++i) {
    fv[2 * i - 1] = f(c - h * xk[i]);
    fv[2 * i] = f(c + h * xk[i]);
  }

  V kron = fv[0] * wk[0];
  V gauss = zero_like(fv[0]);
  double abs_sum = wk[0] * magnitude(fv[0]);
  for (std::size_t i = 1; i < 11; ++i) {
    const V pair = fv[2 * i - 1] + fv[2 * i];
    kron = kron + pair * wk[i];
    abs_sum += wk[i] * (magnitude(fv[2 * i - 1]) + magnitude(fv[2 * i]));
    if (i % 2 == 1) gauss = gauss + pair * wg[i / 2];
  }

  const V mean = kron * 0.5;
  double asc = wk[0] * magnitude(fv[0] - mean);
  for (std::size_t i = 1; i < 11; ++i)
    asc += wk[i] * (magnitude(fv[2 * i - 1] - mean) + magnitude(fv[2 * i] - mean));

  const double resabs = abs_sum * std::abs(h);
  const double resasc = asc * std::abs(h);
  double err = magnitude(kron - gauss) * std::abs(h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);

  return Panel<V>{a, b, kron * h, err, resabs};
}

}  // namespace detail

/// Globally adaptive 21-point Gauss-Kronrod integration of f over [a, b].
///
/// `initial_panels` pre-splits the interval uniformly, which matters for
/// oscillatory integrands whose period is known to the caller. Throws
/// QuadratureError carrying the best estimate if the target is not reached.
template <class V, class F>
QuadratureResult<V> integrate(F&& f, double a, double b, const QuadratureSpec& spec,
                              std::size_t initial_panels = 1) {
  using detail::Panel;
  std::priority_queue<Panel<V>> heap;
  QuadratureResult<V> out;
  initial_panels = std::max<std::size_t>(1, std::min(initial_panels, spec.max_subdivisions));

  double total_error = 0.0;
  double total_l1 = 0.0;
  V total{};
  bool first = true;
  for (std::size_t i = 0; i < initial_panels; ++i) {
    const double lo = a + (b - a) * static_cast<double>(i) / static_cast<double>(initial_panels);
    const double hi = (i + 1 == initial_panels)
                          ? b
                          : a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(initial_panels);
    auto p = detail::gk21<V>(f, lo, hi);
    if (first)
      total = p.value;
    else
      total = total + p.value;
    first = false;
    total_error += p.error;
    total_l1 += p.l1;
    heap.push(std::move(p));
  }
  out.evaluations = 21 * initial_panels;

  auto target = [&] {
    const double mag = detail::magnitude(total);
    return std::max({spec.abs_tol, spec.rel_tol * mag, spec.rel_tol * spec.cancellation_floor * total_l1});
  };

  while (total_error > target() && heap.size() < spec.max_subdivisions) {
    Panel<V> worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // panel at machine resolution
    heap.pop();
    auto left = detail::gk21<V>(f, worst.a, mid);
    auto right = detail::gk21<V>(f, mid, worst.b);
    out.evaluations += 42;
    total = total - worst.value + left.value + right.value;
    total_error += left.error + right.error - worst.error;
    total_l1 += left.l1 + right.l1 - worst.l1;
    heap.push(std::move(left));
    heap.push(std::move(right));
  }

  // Re-sum from scratch to remove drift from the running updates.
  out.panels = heap.size();
  out.error = 0.0;
  out.l1 = 0.0;
  first = true;
  while (!heap.empty()) {
    const auto& p = heap.top();
    if (first)
      out.value = p.value;
    else
      out.value = out.value + p.value;
    first = false;
    out.error += p.error;
    out.l1 += p.l1;
    heap.pop();
  }
  total = out.value;
  total_l1 = out.l1;
  if (out.error > target()) {
    throw QuadratureError("adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "], error estimate " + std::to_string(out.error),
                          detail::magnitude(out.value), out.error);
  }
  return out;
}

}  // namespace cpforce
