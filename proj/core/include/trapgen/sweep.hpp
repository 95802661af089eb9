#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "trapgen/analytic.hpp"
#include "trapgen/optics.hpp"

namespace trapgen {

/// Inclusive linear range. n == 1 requires lo == hi.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 1;

  void validate() const;
  [[nodiscard]] std::vector<double> values() const;
};

/// darkness[i_phi * b_values.size() + i_b] = |A2(0)|^2 / ((f1/f2)^2 |A0|^2).
struct SweepGrid {
  std::vector<double> phi_values;  // rad
  std::vector<double> b_values;    // units of x1 f1 / (a k)
  std::vector<double> darkness;

  [[nodiscard]] double at(std::size_t i_phi, std::size_t i_b) const {
    return darkness[i_phi * b_values.size() + i_b];
  }
};

/// Centre intensity of a dark mask with real |t_a|, relative phase phi and
/// background t_b over the (phi, b) grid, from the closed-form centre field.
SweepGrid darkness_map(double t_a_mag, const SystemSpec& sys, double a, const Range& phi, const Range& b,
                       double t_b = 1.0, std::size_t threads = 0);

struct DarkestB {
  double b = 0.0;  // units of x1 f1 / (a k)
  double darkness = 0.0;
  bool at_boundary = false;  // the minimum sits on the search bracket edge
};

/// Golden-section minimum of the centre intensity over b in [lo, hi], started
/// from the best point of a 64-step prescan.
DarkestB find_darkest_b(cplx t_a, const SystemSpec& sys, double a, double lo, double hi, cplx t_b = 1.0);

/// Dual bright/dark mask whose bright and dark sites give equal
/// polarizability-weighted depths. Opaque variant: t_a2 = 0 disks of radius
/// a x0/x1. Scaled variant: t_a2 = 0.287 t_b disks of radius a.
MaskSpec design_dual_mask(double alpha_bright, double alpha_dark, double a, double d, std::size_t grid_n,
                          DarkVariant variant);

/// CSV whose header row holds the b axis and whose rows start with phi (rad),
/// plus `<path>.json` with the sweep parameters.
void write_sweep_csv(const std::filesystem::path& path, const SweepGrid& grid, double t_a_mag, double t_b,
                     const SystemSpec& sys, double a);

}  // namespace trapgen
