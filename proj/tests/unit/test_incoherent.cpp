#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "trapgen/error.hpp"
#include "trapgen/incoherent.hpp"
#include "trapgen/optics.hpp"

using namespace trapgen;

namespace {

const Geometry kGeom = make_geometry(128, 128, 2e-6, 2e-6);

SourceSpec source(std::size_t n_spectral, std::size_t n_modes, std::uint64_t seed) {
  SourceSpec s;
  s.lambda0 = 825e-9;
  s.fwhm = 3e-9;
  s.n_spectral = n_spectral;
  s.n_modes = n_modes;
  s.mode_waist = 30e-6;
  s.seed = seed;
  return s;
}

cplx overlap(const Field& a, const Field& b) {
  cplx s{};
  for (std::size_t k = 0; k < a.geometry().size(); ++k) s += std::conj(a.data()[k]) * b.data()[k];
  return s * a.geometry().dx * a.geometry().dy;
}

}  // namespace

TEST(HgModes, ListOrderedByTotalOrder) {
  const auto l = hg_mode_list(6);
  const std::vector<std::pair<int, int>> expect{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
  EXPECT_EQ(l, expect);
}

TEST(HgModes, OrthonormalProperty) {
  const auto l = hg_mode_list(10);
  std::vector<Field> modes;
  for (auto [m, n] : l) modes.push_back(hg_mode(m, n, 20e-6, kGeom));
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = 0; j < modes.size(); ++j) {
      EXPECT_NEAR(std::abs(overlap(modes[i], modes[j])), i == j ? 1.0 : 0.0, 1e-9) << i << "," << j;
    }
  }
}

TEST(HgModes, RejectsModesLeavingTheGrid) {
  EXPECT_THROW(hg_mode(0, 0, 200e-6, kGeom), GeometryError);
  EXPECT_THROW(hg_mode(-1, 0, 10e-6, kGeom), InvalidArgument);
}

TEST(Speckle, UnitPowerAndDeterministic) {
  const auto s = source(5, 12, 42);
  const auto a = sample_speckle(s, 2, 0, kGeom);
  EXPECT_NEAR(total_power(a), 1.0, 1e-9);
  const auto b = sample_speckle(s, 2, 0, kGeom);
  for (std::size_t k = 0; k < kGeom.size(); ++k) EXPECT_EQ(a.data()[k], b.data()[k]);
}

TEST(Speckle, IndependentOfEvaluationOrder) {
  const auto s = source(5, 12, 42);
  const auto late = sample_speckle(s, 4, 0, kGeom);
  (void)sample_speckle(s, 0, 0, kGeom);
  const auto again = sample_speckle(s, 4, 0, kGeom);
  for (std::size_t k = 0; k < kGeom.size(); ++k) EXPECT_EQ(late.data()[k], again.data()[k]);
}

TEST(Speckle, SeedsAndComponentsDiffer) {
  const auto a = sample_speckle(source(5, 12, 1), 0, 0, kGeom);
  const auto b = sample_speckle(source(5, 12, 2), 0, 0, kGeom);
  const auto c = sample_speckle(source(5, 12, 1), 1, 0, kGeom);
  EXPECT_LT(std::abs(overlap(a, b)), 0.9);
  EXPECT_LT(std::abs(overlap(a, c)), 0.9);
  EXPECT_THROW(sample_speckle(source(5, 12, 1), 5, 0, kGeom), InvalidArgument);
}

TEST(Spectrum, WavelengthsAndWeights) {
  const auto s = source(21, 1, 0);
  const auto w = component_wavelengths(s);
  ASSERT_EQ(w.size(), 21u);
  EXPECT_NEAR(w.front(), s.lambda0 - s.fwhm, 1e-18);
  EXPECT_NEAR(w.back(), s.lambda0 + s.fwhm, 1e-18);
  EXPECT_NEAR(w[10], s.lambda0, 1e-18);
  double total = 0.0;
  for (double l : w) total += lorentzian_weight(l, s);
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(lorentzian_profile(s.lambda0, s), 1.0);
  // Half maximum at lambda0 +/- fwhm/2 to first order in fwhm/lambda0.
  EXPECT_NEAR(lorentzian_profile(s.lambda0 + 0.5 * s.fwhm, s), 0.5, 5e-3);
  EXPECT_NEAR(lorentzian_profile(s.lambda0 - 0.5 * s.fwhm, s), 0.5, 5e-3);
}

TEST(Spectrum, MonochromaticHasOneComponent) {
  auto s = source(1, 1, 0);
  s.fwhm = 0.0;
  const auto w = component_wavelengths(s);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_DOUBLE_EQ(w[0], s.lambda0);
  EXPECT_DOUBLE_EQ(lorentzian_weight(w[0], s), 1.0);
}

TEST(Source, Validation) {
  auto s = source(3, 3, 0);
  s.fwhm = -1.0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = source(3, 3, 0);
  s.mode_waist = 0.0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = source(0, 3, 0);
  EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(Ensemble, ThreadCountDoesNotChangeResult) {
  const SystemSpec sys{0.1, 0.1, 825e-9};
  MaskSpec m;
  m.kind = MaskKind::Dark;
  m.params = MaskParams{10e-6, 30e-6, 0.287, 1.0, 0.0};
  m.grid_n = 2;
  const Field mask = render_mask(m, kGeom);
  const auto filter = iris_filter(1.0, m.params.a, sys);
  const auto s = source(5, 8, 3);
  const auto a = incoherent_volume(s, mask, filter, sys, {0.0, 1e-4}, 1);
  const auto b = incoherent_volume(s, mask, filter, sys, {0.0, 1e-4}, 4);
  ASSERT_EQ(a.planes.size(), 2u);
  for (std::size_t p = 0; p < 2; ++p) {
    for (std::size_t k = 0; k < a.planes[p].geometry().size(); ++k) {
      EXPECT_EQ(a.planes[p].data()[k], b.planes[p].data()[k]);
    }
  }
  const auto manifest = ensemble_manifest(s);
  EXPECT_NE(manifest.find("\"seed\""), std::string::npos);
}
