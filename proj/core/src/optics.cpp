#include "trapgen/optics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "trapgen/error.hpp"
#include "trapgen/fft.hpp"
#include "trapgen/parallel.hpp"

namespace trapgen {

namespace {

const double kX1 = bessel_zero(1, 1);

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void paint_disk(Field& f, Point c, double r, cplx value) {
  const auto& g = f.geometry();
  const auto lo_i = static_cast<long>(std::floor((c.x - r) / g.dx)) + static_cast<long>(g.nx / 2);
  const auto hi_i = static_cast<long>(std::ceil((c.x + r) / g.dx)) + static_cast<long>(g.nx / 2);
  const auto lo_j = static_cast<long>(std::floor((c.y - r) / g.dy)) + static_cast<long>(g.ny / 2);
  const auto hi_j = static_cast<long>(std::ceil((c.y + r) / g.dy)) + static_cast<long>(g.ny / 2);
  const double r2 = r * r;
  for (long j = std::max(0L, lo_j); j <= std::min<long>(hi_j, static_cast<long>(g.ny) - 1); ++j) {
    const double y = g.y(static_cast<std::size_t>(j)) - c.y;
    for (long i = std::max(0L, lo_i); i <= std::min<long>(hi_i, static_cast<long>(g.nx) - 1); ++i) {
      const double x = g.x(static_cast<std::size_t>(i)) - c.x;
      if (x * x + y * y <= r2) f(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = value;
    }
  }
}

void check_resolution(double radius, const Geometry& g, const char* what) {
  const double pitch = std::max(g.dx, g.dy);
  if (2.0 * radius / pitch < 8.0) {
    throw ResolutionError(std::string("render_mask: ") + what + " of radius " + num(radius) +
                          " m spans fewer than 8 samples; pitch must be <= " + num(radius / 4.0) +
                          " m (is " + num(pitch) + " m)");
  }
}

}  // namespace

void MaskSpec::validate() const {
  if (grid_n < 1) throw InvalidArgument("mask: grid_n must be >= 1");
  if (!(params.a > 0.0)) throw InvalidArgument("mask: a must be positive");
  if (grid_n > 1 && params.d < 2.0 * params.a) throw InvalidArgument("mask: pitch d must be at least 2a");
  if (std::abs(params.t_a) > 1.0 + 1e-12 || std::abs(params.t_b) > 1.0 + 1e-12) {
    throw InvalidArgument("mask: |t_a| and |t_b| must not exceed 1");
  }
  if (kind == MaskKind::Dual) {
    if (!dual) throw InvalidArgument("mask: dual kind needs dual-site parameters");
    if (std::abs(params.t_a - cplx{1.0, 0.0}) > 1e-12) {
      throw InvalidArgument("mask: dual kind needs fully transmitting bright apertures (t_a = 1)");
    }
    if (!(std::abs(dual->t_a) < std::abs(params.t_b))) {
      throw InvalidArgument("mask: dual kind needs |t_a,2| < |t_b|");
    }
    if (!(dual->radius_ratio > 0.0)) throw InvalidArgument("mask: dual radius ratio must be positive");
    if (grid_n < 2) throw InvalidArgument("mask: dual kind needs grid_n >= 2");
    if (params.d < 2.0 * params.a * std::max(1.0, dual->radius_ratio) * std::sqrt(2.0)) {
      throw InvalidArgument("mask: dual disks overlap the bright apertures");
    }
  }
}

std::vector<Point> MaskSpec::site_centers() const {
  std::vector<Point> out;
  out.reserve(grid_n * grid_n);
  const double off = 0.5 * static_cast<double>(grid_n - 1);
  for (std::size_t j = 0; j < grid_n; ++j) {
    for (std::size_t i = 0; i < grid_n; ++i) {
      out.push_back({(static_cast<double>(i) - off) * params.d, (static_cast<double>(j) - off) * params.d});
    }
  }
  return out;
}

std::vector<Point> MaskSpec::dual_centers() const {
  std::vector<Point> out;
  if (kind != MaskKind::Dual || grid_n < 2) return out;
  const double off = 0.5 * static_cast<double>(grid_n - 1);
  for (std::size_t j = 0; j + 1 < grid_n; ++j) {
    for (std::size_t i = 0; i + 1 < grid_n; ++i) {
      out.push_back({(static_cast<double>(i) + 0.5 - off) * params.d,
                     (static_cast<double>(j) + 0.5 - off) * params.d});
    }
  }
  return out;
}

double MaskSpec::half_extent() const {
  return 0.5 * static_cast<double>(grid_n - 1) * params.d + params.a;
}

void FilterSpec::validate() const {
  if (kind == FilterKind::None) return;
  if (!(b > 0.0)) throw InvalidArgument("filter: radius b must be positive");
  if (kind == FilterKind::Zone) {
    double prev = b;
    for (const auto& [inner, outer] : rings) {
      if (!(inner < outer)) throw InvalidArgument("filter: zone ring needs inner < outer");
      if (!(inner >= prev)) throw InvalidArgument("filter: zone rings must be sorted and disjoint");
      prev = outer;
    }
  }
}

Field render_mask(const MaskSpec& spec, const Geometry& geom) {
  spec.validate();
  check_resolution(spec.params.a, geom, "aperture");
  if (spec.dual) check_resolution(spec.params.a * spec.dual->radius_ratio, geom, "dual disk");

  const double half = spec.half_extent();
  const double room = 0.25 * std::min(geom.extent_x(), geom.extent_y());
  if (half > room) {
    throw GeometryError("render_mask: mask array half-width " + num(half) +
                        " m exceeds a quarter of the grid extent (" + num(room) +
                        " m); enlarge the grid to keep a guard band");
  }

  const cplx background = spec.kind == MaskKind::Bright ? cplx{} : spec.params.t_b;
  Field f(geom, background);
  const cplx hole = spec.params.aperture();
  for (const auto& c : spec.site_centers()) paint_disk(f, c, spec.params.a, hole);
  if (spec.kind == MaskKind::Dual) {
    const cplx dark = spec.dual->t_a * std::polar(1.0, spec.dual->phi_ab);
    for (const auto& c : spec.dual_centers()) {
      paint_disk(f, c, spec.params.a * spec.dual->radius_ratio, dark);
    }
  }
  return f;
}

Field render_filter(const FilterSpec& spec, const Geometry& geom) {
  spec.validate();
  if (spec.kind == FilterKind::None || std::isinf(spec.b)) {
    if (spec.kind == FilterKind::Zone && std::isinf(spec.b)) {
      throw InvalidArgument("render_filter: zone filter needs a finite central radius");
    }
    return Field(geom, cplx{1.0, 0.0});
  }
  double rmax = spec.b;
  for (const auto& ring : spec.rings) rmax = std::max(rmax, ring.second);
  if (spec.kind == FilterKind::Iris) rmax = spec.b;
  const double limit = geom.inner_radius();
  if (rmax > limit) {
    throw GeometryError("render_filter: filter radius " + num(rmax) + " m exceeds the Fourier-plane half-extent " +
                        num(limit) + " m");
  }

  Field f(geom, cplx{});
  for (std::size_t j = 0; j < geom.ny; ++j) {
    const double y = geom.y(j);
    for (std::size_t i = 0; i < geom.nx; ++i) {
      const double x = geom.x(i);
      const double r = std::sqrt(x * x + y * y);
      bool pass = r <= spec.b;
      if (!pass && spec.kind == FilterKind::Zone) {
        for (const auto& [inner, outer] : spec.rings) {
          if (r >= inner && r <= outer) {
            pass = true;
            break;
          }
        }
      }
      if (pass) f(i, j) = 1.0;
    }
  }
  return f;
}

Geometry fourier_geometry(const Geometry& in, double focal, double lambda) {
  if (!(focal > 0.0) || !(lambda > 0.0)) throw InvalidArgument("lens: focal length and wavelength must be positive");
  return make_geometry(in.nx, in.ny, lambda * focal / (static_cast<double>(in.nx) * in.dx),
                       lambda * focal / (static_cast<double>(in.ny) * in.dy));
}

Field lens_fourier(const Field& in, double focal, double lambda, const LensOptions& opts) {
  const auto& g = in.geometry();
  const Geometry out_geom = fourier_geometry(g, focal, lambda);
  Field out(out_geom, std::vector<cplx>(in.samples().begin(), in.samples().end()));
  ifftshift(out);
  fft2d(out.data(), g.nx, g.ny, FftDirection::Forward);
  fftshift(out);
  const cplx scale = cplx{0.0, -1.0} * (g.dx * g.dy / (lambda * focal));
  for (auto& v : out.samples()) v *= scale;

  if (opts.check_aliasing) {
    double total = 0.0, edge = 0.0;
    const double hx = 0.5 * static_cast<double>(g.nx), hy = 0.5 * static_cast<double>(g.ny);
    for (std::size_t j = 0; j < g.ny; ++j) {
      const double ry = std::abs(static_cast<double>(j) - static_cast<double>(g.ny / 2)) / hy;
      for (std::size_t i = 0; i < g.nx; ++i) {
        const double p = std::norm(out(i, j));
        total += p;
        const double rx = std::abs(static_cast<double>(i) - static_cast<double>(g.nx / 2)) / hx;
        if (std::max(rx, ry) > 0.9) edge += p;
      }
    }
    if (total > 0.0 && edge / total > opts.alias_limit) {
      throw AliasingError("lens_fourier: " + num(100.0 * edge / total) +
                          "% of the transformed power lies in the outer tenth of the grid (limit " +
                          num(100.0 * opts.alias_limit) + "%); the input is undersampled, use a pitch of at most " +
                          num(0.5 * g.dx) + " m or smooth the input");
    }
  }
  return out;
}

Field propagate_4f(const Field& input, const Field& mask_field, const FilterSpec& filter,
                   const SystemSpec& sys) {
  sys.validate();
  if (!(input.geometry() == mask_field.geometry())) {
    throw InvalidArgument("propagate_4f: input and mask geometries differ");
  }
  Field masked = input;
  auto m = mask_field.samples();
  auto s = masked.samples();
  for (std::size_t k = 0; k < s.size(); ++k) s[k] *= m[k];

  Field fourier = lens_fourier(masked, sys.f1, sys.lambda);
  const Field pass = render_filter(filter, fourier.geometry());
  auto p = pass.samples();
  auto fs = fourier.samples();
  for (std::size_t k = 0; k < fs.size(); ++k) fs[k] *= p[k];
  return lens_fourier(fourier, sys.f2, sys.lambda, LensOptions{false, 1.0});
}

Field propagate_4f(const Field& input, const MaskSpec& mask, const FilterSpec& filter,
                   const SystemSpec& sys) {
  return propagate_4f(input, render_mask(mask, input.geometry()), filter, sys);
}

namespace {

std::vector<double> spatial_freqs(std::size_t n, double d) {
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = i < (n + 1) / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n);
    f[i] = ii / (static_cast<double>(n) * d);
  }
  return f;
}

Field spectrum_of(const Field& in) {
  Field s = in;
  ifftshift(s);
  fft2d(s.data(), s.nx(), s.ny(), FftDirection::Forward);
  return s;
}

Field propagate_spectrum(const Field& spectrum, const std::vector<double>& fx, const std::vector<double>& fy,
                         double z, double lambda) {
  const double k = 2.0 * kPi / lambda;
  Field out = spectrum;
  const std::size_t nx = out.nx(), ny = out.ny();
  for (std::size_t j = 0; j < ny; ++j) {
    const double ky = 2.0 * kPi * fy[j];
    for (std::size_t i = 0; i < nx; ++i) {
      const double kx = 2.0 * kPi * fx[i];
      const double arg = k * k - kx * kx - ky * ky;
      if (arg <= 0.0) {
        out(i, j) = 0.0;
      } else {
        out(i, j) *= std::polar(1.0, (std::sqrt(arg) - k) * z);
      }
    }
  }
  fft2d(out.data(), nx, ny, FftDirection::Backward);
  const double inv = 1.0 / static_cast<double>(nx * ny);
  for (auto& v : out.samples()) v *= inv;
  fftshift(out);
  return out;
}

}  // namespace

Field propagate_angular(const Field& in, double z, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("propagate_angular: wavelength must be positive");
  if (z == 0.0) return in;
  const auto& g = in.geometry();
  return propagate_spectrum(spectrum_of(in), spatial_freqs(g.nx, g.dx), spatial_freqs(g.ny, g.dy), z, lambda);
}

Volume axial_scan(const Field& focal, const std::vector<double>& z_values, double lambda,
                  std::size_t threads) {
  if (!(lambda > 0.0)) throw InvalidArgument("axial_scan: wavelength must be positive");
  if (z_values.empty()) throw InvalidArgument("axial_scan: no z values");
  for (std::size_t i = 1; i < z_values.size(); ++i) {
    if (!(z_values[i] > z_values[i - 1])) throw InvalidArgument("axial_scan: z values must be strictly increasing");
  }
  const auto& g = focal.geometry();
  const auto fx = spatial_freqs(g.nx, g.dx);
  const auto fy = spatial_freqs(g.ny, g.dy);
  const Field spectrum = spectrum_of(focal);

  Volume v;
  v.z_values = z_values;

  const double k = 2.0 * kPi / lambda;
  double total = 0.0, evanescent = 0.0;
  std::vector<std::pair<double, double>> band;  // (|f|, power)
  band.reserve(g.nx * g.ny);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double p = std::norm(spectrum(i, j));
      total += p;
      const double kx = 2.0 * kPi * fx[i], ky = 2.0 * kPi * fy[j];
      if (kx * kx + ky * ky >= k * k) evanescent += p;
      if (p > 0.0) band.emplace_back(std::hypot(fx[i], fy[j]), p);
    }
  }
  if (total > 0.0 && evanescent / total > 1e-3) {
    v.warnings.push_back("axial_scan: " + num(100.0 * evanescent / total) +
                         "% of the spectral power is evanescent; the grid pitch is below the wavelength scale");
  }
  // Light spreads by z * lambda * f_max; wraparound starts once that eats the
  // guard margin of a quarter extent on each side.
  std::sort(band.begin(), band.end());
  double f_max = 0.0, acc = 0.0;
  for (const auto& [f, p] : band) {
    f_max = f;
    acc += p;
    if (acc >= (1.0 - 1e-4) * total) break;
  }
  const double margin = 0.25 * std::min(static_cast<double>(g.nx) * g.dx, static_cast<double>(g.ny) * g.dy);
  const double zfar = std::max(std::abs(z_values.front()), std::abs(z_values.back()));
  if (f_max > 0.0 && zfar * lambda * f_max > margin) {
    v.warnings.push_back("axial_scan: |z| up to " + num(zfar) + " m spreads the field by " +
                         num(zfar * lambda * f_max) + " m, beyond the guard margin " + num(margin) +
                         " m; expect wraparound");
  }

  v.planes.resize(z_values.size());
  parallel_for(z_values.size(), threads, [&](std::size_t n) {
    const double z = z_values[n];
    v.planes[n] = z == 0.0 ? intensity(focal) : intensity(propagate_spectrum(spectrum, fx, fy, z, lambda));
  });
  return v;
}

std::vector<std::pair<double, double>> zone_filter_radii(double a, const SystemSpec& sys, int n_rings) {
  sys.validate();
  if (n_rings < 0) throw InvalidArgument("zone_filter_radii: n_rings must be >= 0");
  if (!(a > 0.0)) throw InvalidArgument("zone_filter_radii: a must be positive");
  std::vector<std::pair<double, double>> out;
  out.emplace_back(0.0, iris_radius(kX1, sys, a));
  for (int n = 1; n <= n_rings; ++n) {
    out.emplace_back(iris_radius(bessel_zero(1, 2 * n), sys, a), iris_radius(bessel_zero(1, 2 * n + 1), sys, a));
  }
  return out;
}

FilterSpec zone_filter(double a, const SystemSpec& sys, int n_rings) {
  const auto radii = zone_filter_radii(a, sys, n_rings);
  FilterSpec f;
  f.kind = FilterKind::Zone;
  f.b = radii.front().second;
  f.rings.assign(radii.begin() + 1, radii.end());
  return f;
}

FilterSpec iris_filter(double units, double a, const SystemSpec& sys) {
  FilterSpec f;
  f.kind = FilterKind::Iris;
  f.b = std::isinf(units) ? std::numeric_limits<double>::infinity() : iris_radius(units * kX1, sys, a);
  return f;
}

void write_volume(const std::filesystem::path& path, const Volume& v) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  for (const auto& plane : v.planes) {
    Field frame(plane.geometry(), cplx{});
    auto src = plane.samples();
    auto dst = frame.samples();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k];
    append_field(os, frame);
  }
  nlohmann::ordered_json side;
  side["format"] = "TFLD";
  side["quantity"] = "intensity";
  side["frames"] = v.planes.size();
  if (!v.planes.empty()) {
    const auto& g = v.planes.front().geometry();
    side["nx"] = g.nx;
    side["ny"] = g.ny;
    side["dx_m"] = g.dx;
    side["dy_m"] = g.dy;
  }
  side["z_values_m"] = v.z_values;
  side["warnings"] = v.warnings;
  std::ofstream js(path.string() + ".json");
  if (!js) throw Error("cannot open " + path.string() + ".json for writing");
  js << side.dump(2) << '\n';
}

Point image_point(Point p, const SystemSpec& sys) {
  const double m = sys.f2 / sys.f1;
  return {-p.x * m, -p.y * m};
}

}  // namespace trapgen
