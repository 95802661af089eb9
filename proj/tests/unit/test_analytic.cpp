#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "trapgen/analytic.hpp"
#include "trapgen/error.hpp"
#include "trapgen/quadrature.hpp"

using namespace trapgen;

namespace {

const SystemSpec kUnit{0.5, 0.5, 808e-9};
const double kX1 = oracle::bessel_zero(1, 1);
const double kX0 = oracle::bessel_zero(0, 1);

double boost_integral(double c, double d, double b) {
  auto f = [&](double z) { return std::cyl_bessel_j(0.0, c * z) * std::cyl_bessel_j(1.0, d * z); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, b, 15, 1e-14);
}

}  // namespace

TEST(BesselZero, MatchesBisection) {
  for (int order : {0, 1, 2}) {
    for (int n = 1; n <= 6; ++n) {
      EXPECT_NEAR(bessel_zero(order, n), oracle::bessel_zero(order, n), 1e-11) << order << "," << n;
    }
  }
  EXPECT_NEAR(bessel_zero(1, 1), 3.8317059702075125, 1e-13);
  EXPECT_THROW(bessel_zero(1, 0), InvalidArgument);
}

TEST(BesselIntegral, SpecExampleClosedForm) {
  // c = 0: the integral is 1 - J0(b) and vanishes at b = x0.
  EXPECT_NEAR(bessel_integral_series(0.0, 1.0, kX1), 1.0 - oracle::j0(kX1), 1e-12);
  EXPECT_NEAR(bessel_integral_series(0.0, 1.0, kX1), 1.40276, 1e-5);
  EXPECT_NEAR(bessel_integral_series(0.0, 1.0, kX0), 1.0, 1e-12);
}

TEST(BesselIntegral, SeriesQuadratureAndThirdRoutesAgree) {
  std::mt19937_64 rng(7);
  // Arguments up to 10, where the series still carries 1e-10.
  std::uniform_real_distribution<double> cd(0.0, 2.5), bd(0.1, 4.0);
  for (int i = 0; i < 200; ++i) {
    const double c = cd(rng), d = cd(rng), b = bd(rng);
    const double series = bessel_integral_series(c, d, b);
    const double quad = bessel_integral_quadrature(c, d, b);
    EXPECT_NEAR(series, quad, 1e-8) << c << " " << d << " " << b;
    EXPECT_NEAR(series, boost_integral(c, d, b), 1e-8);
    EXPECT_NEAR(series, oracle::bessel_integral(c, d, b), 1e-8);
  }
}

TEST(BesselIntegral, SeriesRefusesLargeArgumentsAndFallbackDelivers) {
  EXPECT_THROW(bessel_integral_series(30.0, 20.0, 3.0), NumericalFailure);
  const double v = finite_bessel_integral(30.0, 20.0, 3.0);
  EXPECT_NEAR(v, boost_integral(30.0, 20.0, 3.0), 1e-9);
  EXPECT_THROW(bessel_integral_series(-1.0, 1.0, 1.0), InvalidArgument);
  EXPECT_DOUBLE_EQ(bessel_integral_series(1.0, 1.0, 0.0), 0.0);
}

TEST(Quadrature, ComplexIntegrandMatchesBoost) {
  auto f = [](double u) { return std::cyl_bessel_j(1.0, u) * std::polar(1.0, -0.3 * u * u); };
  const auto ours = integrate_gk<cplx>(f, 0.0, 7.0, 1e-13);
  auto re = [&](double u) { return f(u).real(); };
  auto im = [&](double u) { return f(u).imag(); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  EXPECT_NEAR(ours.value.real(), GK::integrate(re, 0.0, 7.0, 15, 1e-14), 1e-11);
  EXPECT_NEAR(ours.value.imag(), GK::integrate(im, 0.0, 7.0, 15, 1e-14), 1e-11);
}

TEST(Quadrature, ReversedLimitsFlipSign) {
  auto f = [](double x) { return x * x; };
  EXPECT_NEAR(integrate_gk(f, 0.0, 2.0).value, 8.0 / 3.0, 1e-12);
  EXPECT_NEAR(integrate_gk(f, 2.0, 0.0).value, -8.0 / 3.0, 1e-12);
}

TEST(FocalField, BrightCentreAndProfile) {
  const double a = 100e-6;
  const cplx c = ag_field_focus(0.0, kUnit, a);
  EXPECT_NEAR(std::norm(c), std::pow(1.0 - oracle::j0(kX1), 2), 1e-10);
  EXPECT_NEAR(std::norm(c), 1.9678, 1e-4);
  for (double s : {0.2, 0.5, 0.8, 1.2}) {
    const double ours = std::norm(ag_field_focus(s * a, kUnit, a)) / std::norm(c);
    EXPECT_NEAR(ours, oracle::bright_profile(s, kX1), 1e-8) << s;
  }
}

TEST(FocalField, MagnificationScalesCentreAmplitude) {
  const double a = 100e-6;
  const SystemSpec sys{0.5, 0.05, 808e-9};
  EXPECT_NEAR(std::abs(ag_field_focus(0.0, sys, a)), 10.0 * std::abs(ag_field_focus(0.0, kUnit, a)), 1e-9);
}

TEST(FocalField, AxialProfileIsEvenAndPeaksAtFocus) {
  const double a = 100e-6;
  const double zR = kPi * std::pow(0.974 * a, 2) / kUnit.lambda;
  for (double z : {0.1 * zR, 0.4 * zR, 1.0 * zR}) {
    const double p = std::norm(ag_field_axial(z, kUnit, a)), m = std::norm(ag_field_axial(-z, kUnit, a));
    EXPECT_NEAR(p, m, 1e-10);
    EXPECT_LT(p, std::norm(ag_field_axial(0.0, kUnit, a)));
  }
}

TEST(FocalField, MaskFieldReducesToAgAndDarkCentre) {
  const double a = 100e-6, b = iris_radius(kX1, kUnit, a);
  MaskParams bright{a, 3 * a, 1.0, 0.0, 0.0};
  EXPECT_NEAR(std::abs(mask_field(0.3 * a, 0.0, bright, kUnit, b) - ag_field_focus(0.3 * a, kUnit, a)), 0.0, 1e-10);

  MaskParams dark{a, 3 * a, 0.4, 1.0, 2.0};
  EXPECT_NEAR(std::abs(mask_field(0.0, 0.0, dark, kUnit, b) - dark_center_field(dark, kUnit, b)), 0.0, 1e-10);
  const double g = 1.0 - oracle::j0(kX1);
  const cplx expect = -(1.0 + (0.4 * std::polar(1.0, 2.0) - 1.0) * g);
  EXPECT_NEAR(std::abs(dark_center_field(dark, kUnit, b) - expect), 0.0, 1e-12);
}

TEST(DarkCondition, SpecExample) {
  const double a = 100e-6;
  const double t = dark_condition_ta(iris_radius(kX1, kUnit, a), kUnit, a);
  EXPECT_NEAR(t, 0.287, 1e-3);
  EXPECT_NEAR(t, oracle::dark_ratio(kX1), 1e-12);
  EXPECT_NEAR(t * t, 0.082, 1e-3);
  EXPECT_THROW(dark_condition_ta(0.0, kUnit, a), SingularCondition);
}

TEST(DarkCondition, ZeroesTheCentreAcrossIrises) {
  const double a = 100e-6;
  for (double u : {0.6, 0.8, 1.0, 1.2}) {
    const double b = iris_radius(u * kX1, kUnit, a);
    MaskParams m{a, 3 * a, dark_condition_ta(b, kUnit, a), 1.0, 0.0};
    EXPECT_LT(std::abs(dark_center_field(m, kUnit, b)), 1e-12) << u;
  }
}

TEST(Expansions, BrightCoefficients) {
  const auto peak = expansion_coeffs(TrapKind::Bright, 3, Normalization::Peak);
  EXPECT_NEAR(peak.radial_a[0], 1.0, 1e-9);
  EXPECT_NEAR(peak.radial_a[1], -2.11, 0.01);
  EXPECT_NEAR(peak.radial_a[2], 1.99, 0.01);
  EXPECT_NEAR(peak.w0_over_a, 0.974, 1e-3);
  EXPECT_NEAR(peak.radial_w0[1], -2.0, 1e-6);
  EXPECT_NEAR(peak.radial_w0[2], 1.79, 0.01);
  EXPECT_NEAR(peak.axial_zR[1], -0.585, 0.005);
  EXPECT_NEAR(peak.axial_zR[2], 0.166, 0.005);
}

TEST(Expansions, RadialQuadraticMatchesOracleCurvature) {
  // Second difference of the oracle profile at the centre.
  const double h = 1e-3;
  const double curv = (oracle::bright_profile(h, kX1) - 1.0) / (h * h);
  const auto peak = expansion_coeffs(TrapKind::Bright, 3, Normalization::Peak);
  EXPECT_NEAR(peak.radial_a[1], curv, 1e-4);
}

TEST(Expansions, DarkKinds) {
  const auto d = expansion_coeffs(TrapKind::Dark287, 3, Normalization::InputIntensity);
  EXPECT_NEAR(d.radial_w0[0], 0.0, 1e-8);
  EXPECT_NEAR(d.radial_w0[1], 0.0, 1e-6);
  EXPECT_NEAR(d.radial_w0[2], 1.0, 0.01);
  EXPECT_NEAR(d.axial_zR[1], 1.01, 0.03);
  const auto o = expansion_coeffs(TrapKind::DarkOpaque, 3, Normalization::InputIntensity);
  EXPECT_NEAR(o.radial_w0[2], 0.31, 0.01);
  EXPECT_NEAR(o.radial_w0[3], -0.12, 0.01);
  EXPECT_NEAR(o.axial_zR[1], 0.31, 0.01);
  EXPECT_NEAR(o.axial_zR[2], -0.03, 0.01);
}

TEST(Expansions, OrderOutOfRangeThrows) {
  EXPECT_THROW(expansion_coeffs(TrapKind::Bright, 0), InvalidArgument);
  EXPECT_THROW(expansion_coeffs(TrapKind::Bright, 7), InvalidArgument);
}

TEST(GaussEquivalent, BrightWaistAndDivergence) {
  const double a = 100e-6;
  const auto g = best_fit_waist(TrapKind::Bright, a, kUnit);
  EXPECT_NEAR(g.w0 / a, 0.974, 1e-3);
  EXPECT_NEAR(g.zR, kPi * g.w0 * g.w0 / kUnit.lambda, 1e-12);
  EXPECT_NEAR(g.h, 1.307, 0.013);
  const auto d = best_fit_waist(TrapKind::Dark287, a, kUnit);
  EXPECT_NEAR(d.h, 0.997, 0.01);
}

TEST(Power, AiryFractionMatchesClosedForm) {
  for (double x : {0.5, 1.0, 2.405, 3.8317, 6.0}) {
    EXPECT_NEAR(airy_power_fraction(x), oracle::airy_fraction(x), 1e-10) << x;
  }
  EXPECT_NEAR(filter_transmission(Passband::IrisX1), 0.84, 0.01);
  EXPECT_NEAR(filter_transmission(Passband::IrisX0), 0.73, 0.01);
  EXPECT_DOUBLE_EQ(filter_transmission(Passband::Open), 1.0);
}

TEST(Power, ThroughputFormula) {
  const double a = 1.0;
  MaskParams bright{a, 3 * a, 1.0, 0.0, 0.0};
  EXPECT_NEAR(power_throughput(bright, Passband::IrisX1), oracle::airy_fraction(kX1) * kPi / 9.0, 1e-12);
  EXPECT_NEAR(power_throughput(bright, Passband::IrisX1), 0.29, 0.005);
  MaskParams opaque{a, 3 * a, 0.0, 1.0, 0.0};
  EXPECT_NEAR(power_throughput(opaque, Passband::IrisX0), oracle::airy_fraction(kX0) * (9.0 - kPi) / 9.0, 1e-12);
}

TEST(Power, EfficiencyOfBrightIsCentreIntensity) {
  EXPECT_NEAR(efficiency(TrapKind::Bright, kUnit), std::pow(1.0 - oracle::j0(kX1), 2), 1e-9);
  const SystemSpec mag{0.5, 0.25, 808e-9};
  EXPECT_NEAR(efficiency(TrapKind::Bright, mag), 4.0 * efficiency(TrapKind::Bright, kUnit), 1e-9);
  EXPECT_NEAR(efficiency(TrapKind::Dark287, kUnit), 1.1, 0.05);
  EXPECT_NEAR(efficiency(TrapKind::DarkOpaque, kUnit), 1.2, 0.05);
}

TEST(Confinement, GaussianClosedForms) {
  const double w0 = 1e-6, lambda = 808e-9, zR = kPi * w0 * w0 / lambda, T = 1e-4, m = 1.443e-25;
  const double U0 = 10.0 * kBoltzmann * T;
  const auto r = confinement(ConfinementKind::Gaussian, U0, T, GaussEquiv{w0, zR, 1.0, 0.0}, m);
  EXPECT_NEAR(r.sigma_rho, w0 / std::sqrt(20.0), 1e-15);
  EXPECT_NEAR(r.sigma_z, zR / std::sqrt(20.0), 1e-15);
  EXPECT_NEAR(r.sigma_rho * 1e6, 0.22, 0.01);
  EXPECT_NEAR(r.sigma_z * 1e6, 0.87, 0.01);
  EXPECT_NEAR(r.omega_rho, 2.0 / w0 * std::sqrt(U0 / m), 1e-6 * r.omega_rho);
  EXPECT_TRUE(r.omega_rho_defined);
  // Equipartition; the radial spread covers two Cartesian axes.
  EXPECT_NEAR(m * r.omega_rho * r.omega_rho * r.sigma_rho * r.sigma_rho, 2.0 * kBoltzmann * T,
              1e-9 * kBoltzmann * T);
  EXPECT_NEAR(m * r.omega_z * r.omega_z * r.sigma_z * r.sigma_z, kBoltzmann * T, 1e-9 * kBoltzmann * T);
}

TEST(Confinement, QuarticRadialHasNoFrequency) {
  const auto r = confinement(ConfinementKind::Dark287, 1e-27, 1e-5, GaussEquiv{1e-6, 4e-6, 1.0, 1.0}, 1e-25);
  EXPECT_FALSE(r.omega_rho_defined);
  EXPECT_GT(r.sigma_rho, 0.0);
  EXPECT_THROW(confinement(ConfinementKind::Dark287, 1e-27, 1e-5, GaussEquiv{1e-6, 4e-6, 1.0, 0.0}, 1e-25),
               InvalidArgument);
  EXPECT_THROW(confinement(ConfinementKind::Gaussian, -1.0, 1e-5, GaussEquiv{1e-6, 4e-6, 1.0, 0.0}, 1e-25),
               InvalidArgument);
}

TEST(Talbot, LengthAndHalfwidth) {
  EXPECT_NEAR(talbot_length(43e-6, 805e-9) * 1e3, 4.59, 0.005);
  const SystemSpec sys{0.5, 0.05, 825e-9};
  const double hw = spectral_halfwidth(71.7e-6, 430e-6, 825e-9, sys);
  EXPECT_NEAR(hw, 0.5 * kPi * 825e-9 * std::pow(71.7 / 430.0, 2) * 0.01, 1e-20);
  const auto rep = spectral_halfwidth_report(71.7e-6, 430e-6, 825e-9, sys);
  EXPECT_GT(rep.image_pitch, 10e-9);
  EXPECT_THROW(talbot_length(0.0, 1e-6), InvalidArgument);
}

TEST(DualSpecies, BalancesAndResidual) {
  EXPECT_NEAR(dual_species_balance(1.0, -1.0, DarkVariant::TaScaled), 0.77, 0.01);
  EXPECT_NEAR(dual_species_balance(847.0, -433.0, DarkVariant::TaScaled), 0.86, 0.01);
  EXPECT_NEAR(dual_species_balance(847.0, -433.0, DarkVariant::Opaque), 0.84, 0.01);
  const double t = dual_species_balance(847.0, -433.0, DarkVariant::Opaque);
  const double g = 1.0 - oracle::j0(kX1);
  const double bright = std::pow((t - 1.0) * g - t, 2) - t * t;
  EXPECT_NEAR(847.0 * bright, 433.0 * efficiency(TrapKind::DarkOpaque, kUnit) * t * t, 1e-8);
  EXPECT_THROW(dual_species_balance(1.0, 1.0, DarkVariant::Opaque), InvalidArgument);
  // f(0) > 0 > f(1) brackets a root for any sign-correct pair.
  EXPECT_GT(dual_species_balance(1.0, -1e6, DarkVariant::Opaque), 0.0);
}

TEST(ZoneFilter, BandsAndGains) {
  const auto bands = zone_bands(2);
  ASSERT_EQ(bands.size(), 3u);
  EXPECT_NEAR(bands[0].hi, kX1, 1e-12);
  EXPECT_NEAR(bands[1].lo, oracle::bessel_zero(1, 2), 1e-10);
  EXPECT_NEAR(bands[1].hi, oracle::bessel_zero(1, 3), 1e-10);
  const auto plain = filter_gain(zone_bands(0));
  EXPECT_NEAR(plain.efficiency, 1.0, 1e-9);
  EXPECT_NEAR(plain.radial, 1.0, 1e-6);
  EXPECT_NEAR(plain.axial, 1.0, 1e-6);
  const auto zone = filter_gain(zone_bands(1));
  EXPECT_GT(zone.efficiency, 1.0);
  EXPECT_THROW(filter_gain({}), InvalidArgument);
}

TEST(Validation, SystemAndMask) {
  EXPECT_THROW(SystemSpec({0.0, 1.0, 1e-6}).validate(), InvalidArgument);
  EXPECT_THROW((MaskParams{1.0, 1.5, 1.0, 0.0, 0.0}).validate(), InvalidArgument);
  EXPECT_THROW((MaskParams{1.0, 3.0, 1.5, 0.0, 0.0}).validate(), InvalidArgument);
  EXPECT_NO_THROW((MaskParams{1.0, 3.0, 1.0, 0.5, 0.0}).validate());
}
