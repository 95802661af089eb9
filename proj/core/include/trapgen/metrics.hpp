#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "trapgen/grid.hpp"
#include "trapgen/optics.hpp"

namespace trapgen {

struct SiteDarkness {
  Point center;
  double probe_mean = 0.0;
  double background = 0.0;
  double darkness = 0.0;  // probe_mean / background
};

/// Mean intensity within probe_radius of each centre over the median of the
/// annulus 2 a_img <= r <= 2.5 a_img around it. Throws GeometryError when a
/// probe reaches its own or a neighbour's annulus, or an annulus leaves the grid.
std::vector<SiteDarkness> site_darkness(const RealGrid& plane, const std::vector<Point>& centers,
                                        double probe_radius, double a_img);

/// Mean over sites of (background - centre) / background.
double site_contrast(const RealGrid& plane, const std::vector<Point>& centers, double probe_radius,
                     double a_img);

struct PowerLawFit {
  double amplitude = 0.0;  // in profile units per m^alpha
  double alpha = 0.0;
  double offset = 0.0;
  std::size_t points = 0;
};

/// Least-squares a rho^alpha + b over profile points inside the profile
/// maximum whose value is at most clip_fraction * max.
PowerLawFit fit_power_law(const RadialProfile& profile, double clip_fraction = 0.36787944117144233);

enum class WaistModel {
  Auto,              // Gaussian if the centre is brighter than the surroundings, else DarkQuartic
  Gaussian,          // A exp(-2 rho^2 / w^2), core I >= 0.9 peak
  InvertedGaussian,  // B (1 - exp(-2 rho^2 / w^2)) + C, B = background, core I - I_min <= 0.1 B
  DarkQuartic,       // B (1 - exp(-rho^2 / w^2))^2 + C, B = background, same core
};

struct WaistFit {
  double w0 = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  WaistModel model = WaistModel::Auto;
  std::size_t points = 0;
};

/// Background of a radial profile: median of its outer quarter.
double profile_background(const RadialProfile& profile);

WaistFit fit_waist(const RadialProfile& profile, WaistModel model = WaistModel::Auto);
double fit_gaussian_waist(const RadialProfile& profile, WaistModel model = WaistModel::Auto);

enum class TrapSign { Bright, Dark };

struct DivergenceFit {
  double h = 0.0;
  double c2 = 0.0;                // normalized (z/zR)^2 coefficient
  std::vector<double> poly;       // normalized coefficients of (z/zR)^0..4
};

/// Degree-4 fit of the axial profile in z/zR, zR = pi w0^2 / lambda. Bright
/// profiles are normalized to their fitted peak, dark ones to `reference`
/// (the background intensity). h = 1/sqrt(|c2|); a Gaussian gives 1.
DivergenceFit fit_divergence(const AxialProfile& axial, double w0, double lambda, TrapSign sign,
                             double reference = 0.0);
double divergence_parameter(const AxialProfile& axial, double w0, double lambda, TrapSign sign,
                            double reference = 0.0);

/// U0/kB in microkelvin for intensity I (W/m^2) and alpha0 in uK/(W/m^2).
double trap_depth(double intensity, double alpha0);

/// Index of the plane nearest z; RangeError unless within tol_fraction |z|.
std::size_t nearest_plane(const Volume& v, double z, double tol_fraction = 0.1);

/// Ratio of incoherent to coherent site contrast at the plane nearest z_talbot.
double talbot_suppression(const Volume& coherent, const Volume& incoherent, double z_talbot,
                          const std::vector<Point>& centers, double probe_radius, double a_img);

/// Pearson correlation of two same-geometry grids over |x|, |y| <= half_width.
double normalized_cross_correlation(const RealGrid& a, const RealGrid& b, double half_width);

struct Revival {
  std::size_t plane = 0;
  double z = 0.0;          // parabola-refined location
  double ncc = 0.0;        // at the best sampled plane
};

/// Plane with z > 0 best correlated with `reference` over the central window,
/// searched beyond the first local minimum of the correlation.
Revival locate_revival(const Volume& v, const RealGrid& reference, double half_width);

struct TrapMetrics {
  Point site_center;
  double center_intensity = 0.0;      // I/I0
  double background_intensity = 0.0;  // I/I0
  double darkness = 0.0;
  double w0_fit = 0.0;                // m
  std::optional<double> alpha_fit;
  std::optional<double> h_fit;
  std::optional<double> depth_uK;
  std::optional<double> omega_rho;    // rad/s
  std::optional<double> omega_z;      // rad/s
};

/// One row per site; frequencies written as omega / (2 pi) in Hz, missing
/// values as empty fields.
void write_metrics_csv(const std::filesystem::path& path, const std::vector<TrapMetrics>& rows);

}  // namespace trapgen
