#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace trapgen {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kSpeedOfLight = 299792458.0;   // m/s

struct SystemSpec {
  double f1 = 0.0;      // m
  double f2 = 0.0;      // m
  double lambda = 0.0;  // m

  [[nodiscard]] double k() const { return 2.0 * kPi / lambda; }
  [[nodiscard]] double magnification() const { return f2 / f1; }
  void validate() const;
};

/// Mask transmission. The aperture amplitude seen by the light is
/// t_a * exp(i phi_ab); the background amplitude is t_b.
struct MaskParams {
  double a = 0.0;  // aperture / disk radius, m
  double d = 0.0;  // array pitch, m
  cplx t_a{1.0, 0.0};
  cplx t_b{0.0, 0.0};
  double phi_ab = 0.0;  // rad

  [[nodiscard]] cplx aperture() const { return t_a * std::polar(1.0, phi_ab); }
  void validate() const;
};

enum class TrapKind { Bright, Dark287, DarkOpaque };
enum class Normalization { InputIntensity, Peak };

std::string to_string(TrapKind kind);

struct ExpansionCoeffs {
  TrapKind kind{};
  Normalization normalization{};
  double w0_over_a = 0.0;
  std::vector<double> radial_a;   // coefficients of (rho/a)^(2j)
  std::vector<double> axial_ak;   // coefficients of (z/(a^2 k))^(2j)
  std::vector<double> radial_w0;  // coefficients of (rho/w0)^(2j)
  std::vector<double> axial_zR;   // coefficients of (z/zR)^(2j)
};

struct GaussEquiv {
  double w0 = 0.0;  // m
  double zR = 0.0;  // m
  double h = 1.0;
  // Quartic radial coefficient in (rho/w0)^4 units; 0 for harmonic traps.
  double radial_quartic = 0.0;
};

struct ConfinementResult {
  double sigma_rho = 0.0;  // m
  double sigma_z = 0.0;    // m
  double omega_rho = 0.0;  // rad/s, meaningful only when omega_rho_defined
  double omega_z = 0.0;    // rad/s
  bool omega_rho_defined = true;
};

enum class ConfinementKind { Gaussian, Bright, Dark287, DarkOpaque };

enum class Passband { IrisX1, IrisX0, Open };

enum class DarkVariant { TaScaled, Opaque };

// Bessel functions --------------------------------------------------------

/// n-th positive zero of J_order, by McMahon start and Newton polish.
double bessel_zero(int order, int n);

/// Integral of J0(c z) J1(d z) for z in [0, b] from the hypergeometric power
/// series, truncated after j_max terms. Throws NumericalFailure if the terms
/// still grow after j_max/2 or if cancellation leaves less than 1e-10
/// absolute accuracy.
double bessel_integral_series(double c, double d, double b, int j_max = 40);

/// Same integral by adaptive Gauss-Kronrod quadrature.
double bessel_integral_quadrature(double c, double d, double b, double abs_tol = 1e-12);

/// Series first, quadrature when the series cannot deliver.
double finite_bessel_integral(double c, double d, double b, int j_max = 40);

// Focal fields --------------------------------------------------------------

/// Iris radius f1 * x / (a k) for a Bessel-zero multiple x.
double iris_radius(double x, const SystemSpec& sys, double a);

/// Filter passbands in the dimensionless Fourier coordinate u = a k rho1 / f1.
struct Band {
  double lo = 0.0;
  double hi = 0.0;
};

/// Response of a unit aperture behind the filter, f1/f2 excluded:
/// g(s, t) = sum over bands of int J0(s u) J1(u) exp(-i t u^2 / 2) du,
/// with s = rho2 f1 / (f2 a) and t = z2 f1^2 / (a^2 k f2^2).
cplx aperture_response(double s, double t, const std::vector<Band>& bands);

/// A2(rho2)/A0 of the bright aG trap in the focal plane. b <= 0 selects the
/// default iris at the first zero of J1.
cplx ag_field_focus(double rho2, const SystemSpec& sys, double a, double b = 0.0);
/// On-axis A2(z2)/A0 including the defocus phase of the filter plane.
cplx ag_field_axial(double z2, const SystemSpec& sys, double a, double b = 0.0);
/// General A2(rho2, z2)/A0 behind a mask with complex transmissions.
cplx mask_field(double rho2, double z2, const MaskParams& mask, const SystemSpec& sys, double b);

/// -(f1/f2)[t_b + (t_a e^{i phi} - t_b)(1 - J0(k a b / f1))].
cplx dark_center_field(const MaskParams& mask, const SystemSpec& sys, double b);

/// t_a/t_b that zeroes the centre for iris radius b. Throws SingularCondition
/// when J0(kab/f1) is numerically 1.
double dark_condition_ta(double b, const SystemSpec& sys, double a);

// Expansions -----------------------------------------------------------------

/// Mask and iris (in x1^(1) f1/(a k) units) that define each trap kind.
MaskParams trap_mask(TrapKind kind, double a);
double trap_iris_units(TrapKind kind);

/// Normalized intensity of a trap kind at s = rho/a, t = z/(a^2 k), f1 = f2.
double trap_intensity(TrapKind kind, double s, double t);

/// Even Taylor coefficients up to power 2*order (order <= 6), extracted by
/// Richardson-extrapolated polynomial differencing of exact evaluations.
ExpansionCoeffs expansion_coeffs(TrapKind kind, int order, Normalization norm);
ExpansionCoeffs expansion_coeffs(TrapKind kind, int order = 3);

/// Gaussian-equivalent waist, Rayleigh range and divergence parameter.
GaussEquiv best_fit_waist(TrapKind kind, double a, const SystemSpec& sys);

/// Passbands of the zone filter in u units: [0, x1] then (x_{2n}, x_{2n+1}).
std::vector<Band> zone_bands(int n_rings);

/// Bright-trap gains of a filter over the plain x1 iris: peak intensity
/// ratio, and the inverse ratios of the radial and axial position spreads at
/// fixed depth and temperature.
struct FilterGain {
  double efficiency = 0.0;
  double radial = 0.0;
  double axial = 0.0;
};
FilterGain filter_gain(const std::vector<Band>& bands);

// Power ------------------------------------------------------------------------

/// Trap intensity relative to the input intensity: bright peak, or the
/// maximum of the dark profile, times (f1/f2)^2.
double efficiency(TrapKind kind, const SystemSpec& sys);

/// Fraction of Airy-pattern power inside u = a k rho1 / f = x.
double airy_power_fraction(double x);
double filter_transmission(Passband kind);

/// eta (|t_b|^2 (d^2 - pi a^2) + |t_a|^2 pi a^2) / d^2.
double power_throughput(const MaskParams& mask, Passband filter);

// Confinement -------------------------------------------------------------------

/// Virial position spreads and vibrational frequencies for depth U0 (J),
/// temperature T (K) and mass m (kg).
ConfinementResult confinement(ConfinementKind kind, double U0, double T, const GaussEquiv& gauss,
                              double m);

// Talbot and spectral width ----------------------------------------------------------

double talbot_length(double d_image, double lambda);

/// (pi lambda / 2)(a/d)^2 (f2/f1)^2, a and d as given.
double spectral_halfwidth(double a, double d, double lambda, const SystemSpec& sys);

struct HalfwidthReport {
  double mask_pitch = 0.0;   // a, d both mask-plane
  double image_pitch = 0.0;  // a mask-plane, d imaged to d f2/f1
};
HalfwidthReport spectral_halfwidth_report(double a, double d, double lambda, const SystemSpec& sys);

// Dual species ------------------------------------------------------------------------

/// Bright-site depth per unit input intensity for background t_b:
/// |(t_b - 1)(1 - J0(x1)) - t_b|^2 - |t_b|^2.
double dual_bright_intensity(double t_b);

/// Background t_b in (0, 1] that balances |alpha_b I_bright| = |alpha_d I_dark|.
/// I_dark is |t_b|^2 times the variant's dark efficiency.
double dual_species_balance(double alpha_bright, double alpha_dark, DarkVariant variant);

}  // namespace trapgen
