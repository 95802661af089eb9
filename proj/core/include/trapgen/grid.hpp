#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace trapgen {

using cplx = std::complex<double>;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Sampling of a uniform 2D grid. Physical (0,0) sits on sample (nx/2, ny/2),
/// so sample i has coordinate (i - nx/2) * dx.
struct Geometry {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;
  double dy = 0.0;

  [[nodiscard]] std::size_t size() const { return nx * ny; }
  [[nodiscard]] double x(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(nx / 2)) * dx;
  }
  [[nodiscard]] double y(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(ny / 2)) * dy;
  }
  [[nodiscard]] Point origin() const { return {x(0), y(0)}; }
  [[nodiscard]] double extent_x() const { return static_cast<double>(nx) * dx; }
  [[nodiscard]] double extent_y() const { return static_cast<double>(ny) * dy; }
  /// Largest radius about the centre sample whose circle stays on the grid.
  [[nodiscard]] double inner_radius() const;
  [[nodiscard]] bool contains(Point p) const;

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Row-major samples (index j * nx + i) on a Geometry.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(Geometry geom, T fill) : geom_(geom), data_(geom.size(), fill) {}
  Grid(Geometry geom, std::vector<T> data);

  [[nodiscard]] const Geometry& geometry() const { return geom_; }
  [[nodiscard]] std::size_t nx() const { return geom_.nx; }
  [[nodiscard]] std::size_t ny() const { return geom_.ny; }

  [[nodiscard]] T& operator()(std::size_t i, std::size_t j) { return data_[j * geom_.nx + i]; }
  [[nodiscard]] const T& operator()(std::size_t i, std::size_t j) const {
    return data_[j * geom_.nx + i];
  }

  [[nodiscard]] std::span<T> samples() { return data_; }
  [[nodiscard]] std::span<const T> samples() const { return data_; }
  [[nodiscard]] T* data() { return data_.data(); }
  [[nodiscard]] const T* data() const { return data_.data(); }

 private:
  Geometry geom_{};
  std::vector<T> data_;
};

using Field = Grid<cplx>;
using RealGrid = Grid<double>;

struct RadialProfile {
  std::vector<double> radii;
  std::vector<double> values;
  Point center;
};

struct AxialProfile {
  std::vector<double> z_values;
  std::vector<double> values;
};

/// Uniform field; throws InvalidArgument on nx, ny < 2 or non-positive pitch.
Field make_field(std::size_t nx, std::size_t ny, double dx, double dy, cplx fill);
Geometry make_geometry(std::size_t nx, std::size_t ny, double dx, double dy);

RealGrid intensity(const Field& f);

/// Sum of |A|^2 dx dy.
double total_power(const Field& f);
/// Sum of samples times dx dy.
double integrate(const RealGrid& g);

/// Azimuthal average in n_bins equal-width bins out to r_max (default: the
/// grid's inner radius about the centre sample). Empty bins are linearly
/// interpolated from their populated neighbours.
RadialProfile radial_profile(const RealGrid& intensity, Point center, std::size_t n_bins,
                             double r_max = 0.0);

/// Bilinear sample of a real grid at a physical point (clamped at edges).
double sample_bilinear(const RealGrid& g, Point p);

// File formats ---------------------------------------------------------------

/// Binary "TFLD" v1 dump: magic, u32 version, u32 nx, u32 ny, f64 dx, f64 dy,
/// then nx*ny (re, im) f64 pairs, all little-endian, row-major.
void write_field(const std::filesystem::path& path, const Field& f);
void append_field(std::ostream& os, const Field& f);
Field read_field(const std::filesystem::path& path);
Field read_field(std::istream& is);

/// Two-column CSV with a `# rho_m,intensity` header.
void write_radial_csv(const std::filesystem::path& path, const RadialProfile& p);
/// Two-column CSV with a `# z_m,intensity` header.
void write_axial_csv(const std::filesystem::path& path, const AxialProfile& p);

/// 8-bit binary PGM (P5), max-normalized.
void write_pgm(const std::filesystem::path& path, const RealGrid& g);

}  // namespace trapgen
