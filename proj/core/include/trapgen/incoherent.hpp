#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trapgen/analytic.hpp"
#include "trapgen/grid.hpp"
#include "trapgen/optics.hpp"

namespace trapgen {

struct SourceSpec {
  double lambda0 = 0.0;          // m
  double fwhm = 0.0;             // m, 0 = monochromatic
  std::size_t n_spectral = 1;
  std::size_t n_modes = 1;
  double mode_waist = 0.0;       // m, at the mask plane
  std::uint64_t seed = 0;
  std::size_t draws = 1;         // speckle draws averaged per spectral component

  void validate() const;
};

/// (m, n) pairs filled by total order m + n, then m ascending.
std::vector<std::pair<int, int>> hg_mode_list(std::size_t n_modes);

/// Unit-power Hermite-Gaussian HG_{m,n} with 1/e^2 intensity waist `waist`.
/// Throws GeometryError when waist * sqrt(max(m, n) + 1) leaves the grid.
Field hg_mode(int m, int n, double waist, const Geometry& geom);

/// sum_k exp(i theta_k) HG_k / sqrt(n_modes). theta_k comes from a generator
/// keyed on (seed, spectral_index, draw_index), so any evaluation order gives
/// the same field.
Field sample_speckle(const SourceSpec& spec, std::size_t spectral_index, std::size_t draw_index,
                     const Geometry& geom);

/// Component wavelengths, uniformly spanning lambda0 +/- fwhm.
std::vector<double> component_wavelengths(const SourceSpec& spec);

/// Lorentzian in optical frequency with peak 1 at lambda0 and half-width
/// c (fwhm/2) / lambda0^2.
double lorentzian_profile(double lambda, const SourceSpec& spec);

/// lorentzian_profile normalized so the weights of all components sum to 1.
double lorentzian_weight(double lambda, const SourceSpec& spec);

/// Incoherent sum over spectral components of the 4f output intensity at
/// each z. Each component uses its own wavelength through the lenses and in
/// propagation; the filter geometry is fixed in physical units. Components
/// run on up to `threads` workers and are accumulated in index order.
Volume incoherent_volume(const SourceSpec& spec, const Field& mask_field, const FilterSpec& filter,
                         const SystemSpec& sys, const std::vector<double>& z_values,
                         std::size_t threads = 0);

/// Coherent reference: uniform unit plane wave at sys.lambda through the
/// same pipeline.
Volume coherent_volume(const Field& mask_field, const FilterSpec& filter, const SystemSpec& sys,
                       const std::vector<double>& z_values, std::size_t threads = 0);

/// JSON manifest: seed, wavelengths, weights, mode list.
std::string ensemble_manifest(const SourceSpec& spec);

}  // namespace trapgen
