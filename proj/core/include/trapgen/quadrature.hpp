#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

#include "trapgen/error.hpp"

namespace trapgen {

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  std::size_t intervals = 0;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodX{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodW{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussW{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double lo, hi;
  T value;
  double error;
  friend bool operator<(const Segment& a, const Segment& b) { return a.error < b.error; }
};

template <class T, class F>
Segment<T> gk15(F& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  const T fc = f(c);
  T kron = fc * kKronrodW[7];
  T gauss = fc * kGaussW[3];
  for (std::size_t k = 0; k < 7; ++k) {
    const T sum = f(c - h * kKronrodX[k]) + f(c + h * kKronrodX[k]);
    kron += sum * kKronrodW[k];
    if (k % 2 == 1) gauss += sum * kGaussW[k / 2];
  }
  return {lo, hi, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (G7/K15) quadrature of f over [lo, hi].
/// T may be double or std::complex<double>. Throws NumericalFailure when the
/// interval budget runs out before max(abs_tol, rel_tol*|I|) is met.
template <class T = double, class F>
QuadResult<T> integrate_gk(F&& f, double lo, double hi, double abs_tol = 1e-10,
                           double rel_tol = 1e-12, std::size_t max_intervals = 2000) {
  if (lo == hi) return {};
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("integrate_gk: infinite limits");
  const double sign = hi > lo ? 1.0 : -1.0;
  if (sign < 0) std::swap(lo, hi);

  std::priority_queue<detail::Segment<T>> heap;
  auto first = detail::gk15<T>(f, lo, hi);
  T total = first.value;
  double err = first.error;
  heap.push(first);
  std::size_t n = 1;

  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (n >= max_intervals) {
      throw NumericalFailure("integrate_gk: no convergence after " + std::to_string(n) +
                             " intervals (error estimate " + std::to_string(err) + ")");
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    auto left = detail::gk15<T>(f, worst.lo, mid);
    auto right = detail::gk15<T>(f, mid, worst.hi);
    heap.push(left);
    heap.push(right);
    ++n;
    total += left.value + right.value - worst.value;
    err = std::max(0.0, err + left.error + right.error - worst.error);
  }
  // The running total drifts by rounding; the final value is a clean re-sum.
  T clean{};
  for (; !heap.empty(); heap.pop()) clean += heap.top().value;
  return {clean * sign, err, n};
}

}  // namespace trapgen
