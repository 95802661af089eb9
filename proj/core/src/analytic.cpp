#include "trapgen/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "trapgen/error.hpp"
#include "trapgen/quadrature.hpp"
#include "linalg.hpp"

namespace trapgen {

namespace {

double j0(double x) { return std::cyl_bessel_j(0.0, x); }
double j1(double x) { return std::cyl_bessel_j(1.0, x); }

const double kX1 = bessel_zero(1, 1);
const double kX0 = bessel_zero(0, 1);

// Coefficients of the even polynomial in x of degree 2K through F(k h), k = 0..K.
std::vector<double> even_interpolant(const std::vector<double>& values, double h) {
  const std::size_t n = values.size();
  const double ymax = std::pow(static_cast<double>(n - 1) * h, 2);
  detail::Matrix A(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double y = std::pow(static_cast<double>(k) * h, 2) / ymax;
    double p = 1.0;
    for (std::size_t j = 0; j < n; ++j, p *= y) A[k][j] = p;
  }
  auto c = detail::solve_dense(std::move(A), values);
  for (std::size_t j = 0; j < n; ++j) c[j] /= std::pow(ymax, static_cast<double>(j));
  return c;
}

template <class F>
std::vector<double> richardson_even_taylor(F&& f, int order, double h) {
  const int K = order + 4;
  auto sample = [&](double step) {
    std::vector<double> v(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) v[static_cast<std::size_t>(k)] = f(k * step);
    return even_interpolant(v, step);
  };
  const auto coarse = sample(h);
  const auto fine = sample(0.5 * h);
  std::vector<double> out(static_cast<std::size_t>(order) + 1);
  for (int j = 0; j <= order; ++j) {
    const double p = std::pow(2.0, 2.0 * (K + 1 - j));
    const auto u = static_cast<std::size_t>(j);
    out[u] = (p * fine[u] - coarse[u]) / (p - 1.0);
  }
  return out;
}

template <class F>
double golden_max(F&& f, double lo, double hi) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  return f(0.5 * (lo + hi));
}

}  // namespace

void SystemSpec::validate() const {
  if (!(f1 > 0.0) || !(f2 > 0.0) || !(lambda > 0.0)) {
    throw InvalidArgument("system: f1, f2 and lambda must be positive");
  }
}

void MaskParams::validate() const {
  if (!(a > 0.0)) throw InvalidArgument("mask: a must be positive");
  if (d < 2.0 * a) throw InvalidArgument("mask: pitch d must be at least 2a");
  if (std::abs(t_a) > 1.0 + 1e-12 || std::abs(t_b) > 1.0 + 1e-12) {
    throw InvalidArgument("mask: |t_a| and |t_b| must not exceed 1");
  }
}

std::string to_string(TrapKind kind) {
  switch (kind) {
    case TrapKind::Bright: return "bright-aG";
    case TrapKind::Dark287: return "dark-aG-287";
    case TrapKind::DarkOpaque: return "dark-aG-opaque";
  }
  return "unknown";
}

double bessel_zero(int order, int n) {
  if (n < 1) throw InvalidArgument("bessel_zero: n must be >= 1");
  if (order < 0) throw InvalidArgument("bessel_zero: order must be >= 0");
  const double nu = order;
  const double beta = (n + 0.5 * nu - 0.25) * kPi;
  double x = beta - (4.0 * nu * nu - 1.0) / (8.0 * beta);
  for (int it = 0; it < 50; ++it) {
    const double jn = std::cyl_bessel_j(nu, x);
    const double dj = order == 0 ? -std::cyl_bessel_j(1.0, x)
                                 : std::cyl_bessel_j(nu - 1.0, x) - nu / x * jn;
    const double step = jn / dj;
    x -= step;
    if (std::abs(step) < 1e-15 * x) break;
  }
  return x;
}

double bessel_integral_series(double c, double d, double b, int j_max) {
  if (c < 0.0 || d < 0.0 || b < 0.0) throw InvalidArgument("bessel_integral: negative argument");
  if (j_max < 1) throw InvalidArgument("bessel_integral: j_max must be >= 1");
  if (b == 0.0 || d == 0.0) return 0.0;

  // Work on t in [0, 1] so the powers stay in range for physical c, d.
  const double C2 = 0.25 * (c * b) * (c * b);
  const double D2 = 0.25 * (d * b) * (d * b);
  const double Dh = 0.5 * d * b;
  const auto n = static_cast<std::size_t>(j_max);

  std::vector<double> p(n), q(n);
  p[0] = 1.0;
  q[0] = Dh;
  for (std::size_t m = 1; m < n; ++m) {
    const auto md = static_cast<double>(m);
    p[m] = p[m - 1] * C2 / (md * md);
    q[m] = q[m - 1] * D2 / (md * (md + 1.0));
  }

  double sum = 0.0, largest = 0.0, prev = 0.0, last = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t m = 0; m <= j; ++m) s += p[m] * q[j - m];
    const double term = s / (2.0 * static_cast<double>(j) + 2.0);
    if (j > n / 2 && term > prev && term > 1e-300) {
      std::ostringstream msg;
      msg << "bessel_integral: series terms still growing at j=" << j << " (c*b=" << c * b
          << ", d*b=" << d * b << ")";
      throw NumericalFailure(msg.str());
    }
    sum += (j % 2 == 0 ? term : -term);
    largest = std::max(largest, term);
    prev = term;
    last = term;
    if (term < 1e-17 * std::max(std::abs(sum), 1e-300) && j > 2) break;
  }
  const double truncation = b * last;
  const double rounding = b * largest * std::numeric_limits<double>::epsilon() * 8.0;
  if (truncation > 1e-10 || rounding > 1e-10) {
    std::ostringstream msg;
    msg << "bessel_integral: series accuracy lost (truncation " << truncation << ", cancellation "
        << rounding << ") for c*b=" << c * b << ", d*b=" << d * b;
    throw NumericalFailure(msg.str());
  }
  return b * sum;
}

double bessel_integral_quadrature(double c, double d, double b, double abs_tol) {
  if (c < 0.0 || d < 0.0 || b < 0.0) throw InvalidArgument("bessel_integral: negative argument");
  if (b == 0.0) return 0.0;
  const double C = c * b, D = d * b;
  auto r = integrate_gk<double>([&](double t) { return j0(C * t) * j1(D * t); }, 0.0, 1.0,
                                abs_tol / b, 1e-14);
  return b * r.value;
}

double finite_bessel_integral(double c, double d, double b, int j_max) {
  try {
    return bessel_integral_series(c, d, b, j_max);
  } catch (const InvalidArgument&) {
    throw;
  } catch (const NumericalFailure&) {
    return bessel_integral_quadrature(c, d, b);
  }
}

double iris_radius(double x, const SystemSpec& sys, double a) {
  return sys.f1 * x / (a * sys.k());
}

cplx aperture_response(double s, double t, const std::vector<Band>& bands) {
  cplx total{};
  for (const auto& band : bands) {
    if (band.hi <= band.lo) continue;
    if (t == 0.0) {
      total += finite_bessel_integral(s, 1.0, band.hi) -
               (band.lo > 0.0 ? finite_bessel_integral(s, 1.0, band.lo) : 0.0);
    } else {
      auto r = integrate_gk<cplx>(
          [&](double u) { return j0(s * u) * j1(u) * std::polar(1.0, -0.5 * t * u * u); }, band.lo,
          band.hi, 1e-14, 1e-14, 5000);
      total += r.value;
    }
  }
  return total;
}

cplx mask_field(double rho2, double z2, const MaskParams& mask, const SystemSpec& sys, double b) {
  sys.validate();
  if (!(mask.a > 0.0)) throw InvalidArgument("mask_field: a must be positive");
  const double ratio = sys.f1 / sys.f2;
  const double s = rho2 * ratio / mask.a;
  const double t = z2 * ratio * ratio / (mask.a * mask.a * sys.k());
  const double ub = mask.a * sys.k() * b / sys.f1;
  const cplx g = aperture_response(s, t, {{0.0, ub}});
  return -ratio * (mask.t_b + (mask.aperture() - mask.t_b) * g);
}

cplx ag_field_focus(double rho2, const SystemSpec& sys, double a, double b) {
  if (rho2 < 0.0) throw InvalidArgument("ag_field_focus: rho2 must be >= 0");
  MaskParams m{a, 2.0 * a, 1.0, 0.0, 0.0};
  return mask_field(rho2, 0.0, m, sys, b > 0.0 ? b : iris_radius(kX1, sys, a));
}

cplx ag_field_axial(double z2, const SystemSpec& sys, double a, double b) {
  MaskParams m{a, 2.0 * a, 1.0, 0.0, 0.0};
  return mask_field(0.0, z2, m, sys, b > 0.0 ? b : iris_radius(kX1, sys, a));
}

cplx dark_center_field(const MaskParams& mask, const SystemSpec& sys, double b) {
  sys.validate();
  const double g = 1.0 - j0(sys.k() * mask.a * b / sys.f1);
  return -(sys.f1 / sys.f2) * (mask.t_b + (mask.aperture() - mask.t_b) * g);
}

double dark_condition_ta(double b, const SystemSpec& sys, double a) {
  if (b < 0.0) throw InvalidArgument("dark_condition_ta: b must be >= 0");
  const double J = j0(sys.k() * a * b / sys.f1);
  if (std::abs(1.0 - J) < 1e-12) {
    throw SingularCondition("dark_condition_ta: J0(kab/f1) = 1, no finite transmission zeroes the centre");
  }
  return -J / (1.0 - J);
}

MaskParams trap_mask(TrapKind kind, double a) {
  switch (kind) {
    case TrapKind::Bright: return {a, 2.0 * a, 1.0, 0.0, 0.0};
    case TrapKind::Dark287: return {a, 2.0 * a, -j0(kX1) / (1.0 - j0(kX1)), 1.0, 0.0};
    case TrapKind::DarkOpaque: return {a, 2.0 * a, 0.0, 1.0, 0.0};
  }
  throw InvalidArgument("trap_mask: unknown kind");
}

double trap_iris_units(TrapKind kind) { return kind == TrapKind::DarkOpaque ? kX0 / kX1 : 1.0; }

double trap_intensity(TrapKind kind, double s, double t) {
  const auto m = trap_mask(kind, 1.0);
  const cplx g = aperture_response(s, t, {{0.0, trap_iris_units(kind) * kX1}});
  return std::norm(m.t_b + (m.aperture() - m.t_b) * g);
}

ExpansionCoeffs expansion_coeffs(TrapKind kind, int order, Normalization norm) {
  if (order < 1 || order > 6) throw InvalidArgument("expansion_coeffs: order must be in [1, 6]");
  ExpansionCoeffs out;
  out.kind = kind;
  out.normalization = norm;

  // Larger steps for high orders keep the differencing well conditioned.
  const double hr = order <= 3 ? 0.3 : 0.45;
  out.radial_a = richardson_even_taylor([&](double s) { return trap_intensity(kind, s, 0.0); }, order, hr);
  out.axial_ak = richardson_even_taylor([&](double t) { return trap_intensity(kind, 0.0, t); }, order,
                                        order <= 3 ? 0.2 : 0.3);

  if (norm == Normalization::Peak) {
    const double peak = kind == TrapKind::Bright ? out.radial_a[0]
                                                 : efficiency(kind, SystemSpec{1.0, 1.0, 1e-6});
    for (auto& c : out.radial_a) c /= peak;
    for (auto& c : out.axial_ak) c /= peak;
  }

  switch (kind) {
    case TrapKind::Bright: {
      const double c1 = out.radial_a[1] / out.radial_a[0];
      out.w0_over_a = std::sqrt(-2.0 / c1);
      break;
    }
    case TrapKind::Dark287: {
      // Quartic match against the background-normalized profile.
      double c2 = out.radial_a[2];
      if (norm == Normalization::Peak) c2 *= efficiency(kind, SystemSpec{1.0, 1.0, 1e-6});
      out.w0_over_a = std::pow(c2, -0.25);
      break;
    }
    case TrapKind::DarkOpaque:
      out.w0_over_a = 0.943;
      break;
  }

  const double rs = out.w0_over_a * out.w0_over_a;
  const double zs = 0.5 * rs;
  out.radial_w0.resize(out.radial_a.size());
  out.axial_zR.resize(out.axial_ak.size());
  for (std::size_t j = 0; j < out.radial_a.size(); ++j) {
    out.radial_w0[j] = out.radial_a[j] * std::pow(rs, static_cast<double>(j));
    out.axial_zR[j] = out.axial_ak[j] * std::pow(zs, 2.0 * static_cast<double>(j));
  }
  return out;
}

ExpansionCoeffs expansion_coeffs(TrapKind kind, int order) {
  return expansion_coeffs(kind, order,
                          kind == TrapKind::Bright ? Normalization::Peak : Normalization::InputIntensity);
}

GaussEquiv best_fit_waist(TrapKind kind, double a, const SystemSpec& sys) {
  sys.validate();
  if (!(a > 0.0)) throw InvalidArgument("best_fit_waist: a must be positive");
  const auto ec = expansion_coeffs(kind, 3);
  GaussEquiv g;
  g.w0 = ec.w0_over_a * a * sys.f2 / sys.f1;
  g.zR = kPi * g.w0 * g.w0 / sys.lambda;
  const double c2 = ec.axial_zR[1];
  g.h = 1.0 / std::sqrt(std::abs(c2));
  g.radial_quartic = kind == TrapKind::Bright ? 0.0 : ec.radial_w0[2];
  return g;
}

std::vector<Band> zone_bands(int n_rings) {
  if (n_rings < 0) throw InvalidArgument("zone_bands: n_rings must be >= 0");
  std::vector<Band> out{{0.0, kX1}};
  for (int n = 1; n <= n_rings; ++n) out.push_back({bessel_zero(1, 2 * n), bessel_zero(1, 2 * n + 1)});
  return out;
}

FilterGain filter_gain(const std::vector<Band>& bands) {
  if (bands.empty()) throw InvalidArgument("filter_gain: no passbands");
  struct Curv {
    double peak, radial, axial;
  };
  auto curvature = [](const std::vector<Band>& b) {
    double umax = 0.0;
    for (const auto& band : b) umax = std::max(umax, band.hi);
    // Steps shrink with the widest passband so the phase per step stays fixed.
    const double hr = 0.3 * kX1 / umax;
    const double ht = 0.2 * (kX1 / umax) * (kX1 / umax);
    const auto r = richardson_even_taylor([&](double s) { return std::norm(aperture_response(s, 0.0, b)); }, 3, hr);
    const auto z = richardson_even_taylor([&](double t) { return std::norm(aperture_response(0.0, t, b)); }, 3, ht);
    return Curv{r[0], -r[1] / r[0], -z[1] / z[0]};
  };
  const auto plain = curvature({{0.0, kX1}});
  const auto c = curvature(bands);
  if (!(c.radial > 0.0) || !(c.axial > 0.0)) throw NumericalFailure("filter_gain: filter gives no bright maximum");
  return {c.peak / plain.peak, std::sqrt(c.radial / plain.radial), std::sqrt(c.axial / plain.axial)};
}

double efficiency(TrapKind kind, const SystemSpec& sys) {
  sys.validate();
  const double mag2 = std::pow(sys.f1 / sys.f2, 2);
  if (kind == TrapKind::Bright) return trap_intensity(kind, 0.0, 0.0) * mag2;

  // Dark traps: the brightest point of the focal profile.
  const double ds = 0.02;
  double best_s = 0.0, best = 0.0;
  for (double s = 0.0; s <= 6.0; s += ds) {
    const double v = trap_intensity(kind, s, 0.0);
    if (v > best) {
      best = v;
      best_s = s;
    }
  }
  const double peak = golden_max([&](double s) { return trap_intensity(kind, s, 0.0); },
                                 std::max(0.0, best_s - ds), best_s + ds);
  return std::max(best, peak) * mag2;
}

double airy_power_fraction(double x) {
  if (x < 0.0) throw InvalidArgument("airy_power_fraction: x must be >= 0");
  if (x == 0.0) return 0.0;
  auto r = integrate_gk<double>(
      [](double u) {
        if (u == 0.0) return 0.0;
        const double v = j1(u);
        return 2.0 * v * v / u;
      },
      0.0, x, 1e-13, 1e-13);
  return r.value;
}

double filter_transmission(Passband kind) {
  switch (kind) {
    case Passband::IrisX1: return airy_power_fraction(kX1);
    case Passband::IrisX0: return airy_power_fraction(kX0);
    case Passband::Open: return 1.0;
  }
  return 1.0;
}

double power_throughput(const MaskParams& mask, Passband filter) {
  mask.validate();
  const double disk = kPi * mask.a * mask.a;
  const double cell = mask.d * mask.d;
  const double eta = filter_transmission(filter);
  return eta * (std::norm(mask.t_b) * (cell - disk) + std::norm(mask.aperture()) * disk) / cell;
}

ConfinementResult confinement(ConfinementKind kind, double U0, double T, const GaussEquiv& gauss,
                              double m) {
  if (!(U0 > 0.0) || !(T > 0.0) || !(m > 0.0)) {
    throw InvalidArgument("confinement: U0, T and m must be positive");
  }
  if (!(gauss.w0 > 0.0) || !(gauss.zR > 0.0) || !(gauss.h > 0.0)) {
    throw InvalidArgument("confinement: w0, zR and h must be positive");
  }
  const double r = kBoltzmann * T / U0;
  ConfinementResult out;
  out.sigma_z = gauss.h * gauss.zR * std::sqrt(0.5 * r);
  out.omega_z = std::sqrt(2.0 * U0 / m) / (gauss.h * gauss.zR);
  if (kind == ConfinementKind::Gaussian || kind == ConfinementKind::Bright) {
    out.sigma_rho = gauss.w0 * std::sqrt(0.5 * r);
    out.omega_rho = 2.0 / gauss.w0 * std::sqrt(U0 / m);
    out.omega_rho_defined = true;
  } else {
    const double q = gauss.radial_quartic;
    if (!(q > 0.0)) throw InvalidArgument("confinement: quartic trap needs a positive quartic coefficient");
    out.sigma_rho = gauss.w0 * std::pow(2.0 / 3.0 * r / q, 0.25);
    out.omega_rho = 0.0;
    out.omega_rho_defined = false;
  }
  return out;
}

double talbot_length(double d_image, double lambda) {
  if (!(d_image > 0.0) || !(lambda > 0.0)) throw InvalidArgument("talbot_length: inputs must be positive");
  return 2.0 * d_image * d_image / lambda;
}

double spectral_halfwidth(double a, double d, double lambda, const SystemSpec& sys) {
  if (!(a > 0.0) || !(d > 0.0) || !(lambda > 0.0)) {
    throw InvalidArgument("spectral_halfwidth: inputs must be positive");
  }
  sys.validate();
  const double m = sys.f2 / sys.f1;
  return 0.5 * kPi * lambda * (a * a) / (d * d) * m * m;
}

HalfwidthReport spectral_halfwidth_report(double a, double d, double lambda, const SystemSpec& sys) {
  return {spectral_halfwidth(a, d, lambda, sys),
          spectral_halfwidth(a, d * sys.f2 / sys.f1, lambda, sys)};
}

double dual_bright_intensity(double t_b) {
  const double g = 1.0 - j0(kX1);
  return std::pow((t_b - 1.0) * g - t_b, 2) - t_b * t_b;
}

double dual_species_balance(double alpha_bright, double alpha_dark, DarkVariant variant) {
  if (!(alpha_bright > 0.0) || !(alpha_dark < 0.0)) {
    throw InvalidArgument("dual_species_balance: need alpha_bright > 0 > alpha_dark");
  }
  const auto kind = variant == DarkVariant::Opaque ? TrapKind::DarkOpaque : TrapKind::Dark287;
  const double eps = efficiency(kind, SystemSpec{1.0, 1.0, 1e-6});
  auto f = [&](double t) {
    return alpha_bright * dual_bright_intensity(t) - std::abs(alpha_dark) * eps * t * t;
  };

  const int n = 1000;
  double lo = 0.0, flo = f(0.0);
  for (int i = 1; i <= n; ++i) {
    const double hi = static_cast<double>(i) / n;
    const double fhi = f(hi);
    if ((flo > 0.0) != (fhi > 0.0)) {
      double a = lo, b = hi, fa = flo;
      while (b - a > 1e-14) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if ((fm > 0.0) == (fa > 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    flo = fhi;
  }
  throw InfeasibleBalance("dual_species_balance: no t_b in (0, 1] balances the two depths");
}

}  // namespace trapgen
