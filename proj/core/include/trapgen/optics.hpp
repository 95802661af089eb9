#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trapgen/analytic.hpp"
#include "trapgen/grid.hpp"

namespace trapgen {

enum class MaskKind { Bright, Dark, Dual };

/// Interleaved dark disks of a dual mask: one at the centre of every square
/// of four bright apertures, radius a * radius_ratio, amplitude t_a e^{i phi}.
struct DualSites {
  cplx t_a{0.0, 0.0};
  double phi_ab = 0.0;
  double radius_ratio = 1.0;
};

struct MaskSpec {
  MaskKind kind = MaskKind::Bright;
  MaskParams params;
  std::size_t grid_n = 1;
  std::optional<DualSites> dual;

  void validate() const;
  /// Aperture centres, row by row, ((i - (n-1)/2) d, (j - (n-1)/2) d).
  [[nodiscard]] std::vector<Point> site_centers() const;
  /// Dual dark-disk centres ((n-1)^2 of them); empty for other kinds.
  [[nodiscard]] std::vector<Point> dual_centers() const;
  /// Half-width of the square holding every disk.
  [[nodiscard]] double half_extent() const;
};

enum class FilterKind { None, Iris, Zone };

struct FilterSpec {
  FilterKind kind = FilterKind::Iris;
  double b = 0.0;  // iris radius, or zone central-disk radius (m); inf = no cut
  std::vector<std::pair<double, double>> rings;  // zone annuli (inner, outer), m

  void validate() const;
};

struct Volume {
  std::vector<double> z_values;
  std::vector<RealGrid> planes;
  std::vector<std::string> warnings;
};

struct LensOptions {
  bool check_aliasing = true;
  // Largest allowed fraction of output power in the outer tenth of the grid.
  double alias_limit = 0.05;
};

/// Transmission field of the mask on `geom`. Throws ResolutionError when an
/// aperture diameter spans fewer than 8 samples and GeometryError when the
/// array does not fit with a guard band of its own size.
Field render_mask(const MaskSpec& spec, const Geometry& geom);

/// Binary {0, 1} filter on the Fourier-plane geometry.
Field render_filter(const FilterSpec& spec, const Geometry& geom);

/// Geometry of the back focal plane of a lens with focal length `focal`.
Geometry fourier_geometry(const Geometry& input, double focal, double lambda);

/// Focal-to-focal lens transform with the 1/(i lambda f) prefactor, power
/// preserving. Applied twice it returns -f(-x, -y).
Field lens_fourier(const Field& in, double focal, double lambda, const LensOptions& opts = {});

/// Mask, lens f1, filter, lens f2. The output pitch is dx f2/f1.
Field propagate_4f(const Field& input, const MaskSpec& mask, const FilterSpec& filter,
                   const SystemSpec& sys);
/// Same with a pre-rendered mask transmission field.
Field propagate_4f(const Field& input, const Field& mask_field, const FilterSpec& filter,
                   const SystemSpec& sys);

/// Angular-spectrum propagation of `focal` to each z. The z = 0 plane is the
/// input intensity. Planes are computed on up to `threads` workers.
Volume axial_scan(const Field& focal, const std::vector<double>& z_values, double lambda,
                  std::size_t threads = 0);

/// Field at one z by angular spectrum.
Field propagate_angular(const Field& in, double z, double lambda);

/// Central disk (0, f1 x1/(ak)) followed by n_rings annuli
/// (f1 x_{2n}/(ak), f1 x_{2n+1}/(ak)), n = 1..n_rings.
std::vector<std::pair<double, double>> zone_filter_radii(double a, const SystemSpec& sys,
                                                          int n_rings);
/// FilterSpec of zone kind built from zone_filter_radii.
FilterSpec zone_filter(double a, const SystemSpec& sys, int n_rings);
/// Iris at `units` multiples of f1 x1/(ak); infinity gives no cut.
FilterSpec iris_filter(double units, double a, const SystemSpec& sys);

/// Concatenated TFLD frames (intensity in the real part) plus `<path>.json`
/// listing z_values.
void write_volume(const std::filesystem::path& path, const Volume& v);

/// Maps a mask-plane point to the image plane of the 4f system.
Point image_point(Point mask_point, const SystemSpec& sys);

}  // namespace trapgen
