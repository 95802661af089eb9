#pragma once

// Reference implementations for the tests. Nothing here calls into the
// library: Bessel functions come from their power series, zeros from
// bisection and integrals from composite Simpson, all in long double.

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace oracle {

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

// J_n(x) = sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!). Accurate to ~1e-15 for
// |x| <= 20 in long double.
inline double jn_series(int n, double xd) {
  const long double x = xd;
  long double term = 1.0L;
  for (int i = 1; i <= n; ++i) term *= x / (2.0L * i);
  long double sum = term;
  const long double q = -(x * x) / 4.0L;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * static_cast<long double>(k + n));
    sum += term;
    if (std::fabs(term) < 1e-22L * (1.0L + std::fabs(sum))) break;
  }
  return static_cast<double>(sum);
}

inline double j0(double x) { return jn_series(0, x); }
inline double j1(double x) { return jn_series(1, x); }

// n-th positive zero of J_order by a sign scan and bisection.
inline double bessel_zero(int order, int n) {
  const double step = 0.05;
  double lo = 0.1, flo = jn_series(order, lo);
  int found = 0;
  for (double hi = lo + step; hi < 60.0; hi += step) {
    const double fhi = jn_series(order, hi);
    if ((flo < 0) != (fhi < 0) && ++found == n) {
      double a = lo, b = hi, fa = flo;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = jn_series(order, m);
        if ((fm < 0) == (fa < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    flo = fhi;
  }
  throw std::runtime_error("oracle::bessel_zero: not found");
}

template <class F>
long double simpson(F&& f, double lo, double hi, std::size_t intervals) {
  if (intervals % 2) ++intervals;
  const long double h = (static_cast<long double>(hi) - lo) / intervals;
  long double s = f(lo) + f(hi);
  for (std::size_t i = 1; i < intervals; ++i) {
    s += (i % 2 ? 4.0L : 2.0L) * f(static_cast<double>(lo + h * i));
  }
  return s * h / 3.0L;
}

// int_0^b J0(c z) J1(d z) dz
inline double bessel_integral(double c, double d, double b, std::size_t intervals = 4000) {
  return static_cast<double>(simpson([&](double z) { return static_cast<long double>(j0(c * z)) * j1(d * z); }, 0.0,
                                     b, intervals));
}

// Fraction of Airy power inside x: 1 - J0(x)^2 - J1(x)^2.
inline double airy_fraction(double x) {
  const double a = j0(x), b = j1(x);
  return 1.0 - a * a - b * b;
}

// Centre field of a top-hat through an iris u <= x, relative to the
// magnified input: t_b + (t_a - t_b)(1 - J0(x)) up to sign.
inline double dark_ratio(double x) {
  const double g = 1.0 - j0(x);
  return 1.0 - 1.0 / g;
}

// Normalized focal intensity of a bright aperture with iris x1 at s = rho/a:
// |int_0^x1 J0(s u) J1(u) du|^2 over its value at s = 0.
inline double bright_profile(double s, double x1) {
  const double c = bessel_integral(s, 1.0, x1);
  const double c0 = 1.0 - j0(x1);
  return c * c / (c0 * c0);
}

}  // namespace oracle
