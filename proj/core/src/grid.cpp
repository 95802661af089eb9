#include "trapgen/grid.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "trapgen/error.hpp"

namespace trapgen {

double Geometry::inner_radius() const {
  const auto lo_x = static_cast<double>(nx / 2);
  const auto hi_x = static_cast<double>(nx - 1 - nx / 2);
  const auto lo_y = static_cast<double>(ny / 2);
  const auto hi_y = static_cast<double>(ny - 1 - ny / 2);
  return std::min(std::min(lo_x, hi_x) * dx, std::min(lo_y, hi_y) * dy);
}

bool Geometry::contains(Point p) const {
  return p.x >= x(0) && p.x <= x(nx - 1) && p.y >= y(0) && p.y <= y(ny - 1);
}

template <class T>
Grid<T>::Grid(Geometry geom, std::vector<T> data) : geom_(geom), data_(std::move(data)) {
  if (data_.size() != geom_.size()) {
    throw InvalidArgument("grid: sample buffer size does not match nx*ny");
  }
}

template class Grid<cplx>;
template class Grid<double>;

Geometry make_geometry(std::size_t nx, std::size_t ny, double dx, double dy) {
  if (nx < 2 || ny < 2) throw InvalidArgument("make_field: nx and ny must be >= 2");
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy)) {
    throw InvalidArgument("make_field: pitch must be positive and finite");
  }
  return Geometry{nx, ny, dx, dy};
}

Field make_field(std::size_t nx, std::size_t ny, double dx, double dy, cplx fill) {
  return Field(make_geometry(nx, ny, dx, dy), fill);
}

RealGrid intensity(const Field& f) {
  RealGrid out(f.geometry(), 0.0);
  auto src = f.samples();
  auto dst = out.samples();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = std::norm(src[k]);
  return out;
}

double total_power(const Field& f) {
  double s = 0.0;
  for (const auto& v : f.samples()) s += std::norm(v);
  return s * f.geometry().dx * f.geometry().dy;
}

double integrate(const RealGrid& g) {
  double s = 0.0;
  for (double v : g.samples()) s += v;
  return s * g.geometry().dx * g.geometry().dy;
}

RadialProfile radial_profile(const RealGrid& img, Point center, std::size_t n_bins,
                             double r_max) {
  const auto& geom = img.geometry();
  if (!geom.contains(center)) throw InvalidArgument("radial_profile: center outside grid");
  if (n_bins < 2) throw InvalidArgument("radial_profile: n_bins must be >= 2");
  if (r_max <= 0.0) {
    const double to_edge = std::min({center.x - geom.x(0), geom.x(geom.nx - 1) - center.x,
                                     center.y - geom.y(0), geom.y(geom.ny - 1) - center.y});
    r_max = std::min(to_edge, geom.inner_radius() > 0 ? to_edge : to_edge);
  }
  if (!(r_max > 0.0)) throw InvalidArgument("radial_profile: center on grid edge");

  const double dr = r_max / static_cast<double>(n_bins);
  std::vector<double> sum(n_bins, 0.0), rsum(n_bins, 0.0);
  std::vector<std::size_t> count(n_bins, 0);

  // Only the bounding box of the disk is visited.
  const auto clamp_index = [](double v, std::size_t n) {
    return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n - 1)));
  };
  const std::size_t i0 = clamp_index(std::floor((center.x - r_max - geom.x(0)) / geom.dx), geom.nx);
  const std::size_t i1 = clamp_index(std::ceil((center.x + r_max - geom.x(0)) / geom.dx), geom.nx);
  const std::size_t j0 = clamp_index(std::floor((center.y - r_max - geom.y(0)) / geom.dy), geom.ny);
  const std::size_t j1 = clamp_index(std::ceil((center.y + r_max - geom.y(0)) / geom.dy), geom.ny);

  for (std::size_t j = j0; j <= j1; ++j) {
    const double ry = geom.y(j) - center.y;
    for (std::size_t i = i0; i <= i1; ++i) {
      const double rx = geom.x(i) - center.x;
      const double r = std::sqrt(rx * rx + ry * ry);
      if (r >= r_max) continue;
      const auto k = std::min(static_cast<std::size_t>(r / dr), n_bins - 1);
      sum[k] += img(i, j);
      rsum[k] += r;
      ++count[k];
    }
  }

  RadialProfile out;
  out.center = center;
  out.radii.resize(n_bins);
  out.values.resize(n_bins);
  std::vector<std::size_t> populated;
  for (std::size_t k = 0; k < n_bins; ++k) {
    if (count[k] > 0) {
      out.radii[k] = rsum[k] / static_cast<double>(count[k]);
      out.values[k] = sum[k] / static_cast<double>(count[k]);
      populated.push_back(k);
    } else {
      out.radii[k] = (static_cast<double>(k) + 0.5) * dr;
    }
  }
  if (populated.empty()) throw InvalidArgument("radial_profile: no samples inside r_max");

  // Fill empty bins by linear interpolation in radius, flat beyond the ends.
  std::size_t p = 0;
  for (std::size_t k = 0; k < n_bins; ++k) {
    if (count[k] > 0) continue;
    while (p + 1 < populated.size() && populated[p + 1] < k) ++p;
    const std::size_t lo = populated[p];
    if (lo > k) {
      out.values[k] = out.values[lo];
      continue;
    }
    if (p + 1 >= populated.size()) {
      out.values[k] = out.values[lo];
      continue;
    }
    const std::size_t hi = populated[p + 1];
    const double t = (out.radii[k] - out.radii[lo]) / (out.radii[hi] - out.radii[lo]);
    out.values[k] = out.values[lo] + t * (out.values[hi] - out.values[lo]);
  }
  return out;
}

double sample_bilinear(const RealGrid& g, Point p) {
  const auto& geom = g.geometry();
  const double fx = std::clamp((p.x - geom.x(0)) / geom.dx, 0.0, static_cast<double>(geom.nx - 1));
  const double fy = std::clamp((p.y - geom.y(0)) / geom.dy, 0.0, static_cast<double>(geom.ny - 1));
  const auto i = std::min(static_cast<std::size_t>(fx), geom.nx - 2);
  const auto j = std::min(static_cast<std::size_t>(fy), geom.ny - 2);
  const double tx = fx - static_cast<double>(i);
  const double ty = fy - static_cast<double>(j);
  return (1 - tx) * (1 - ty) * g(i, j) + tx * (1 - ty) * g(i + 1, j) +
         (1 - tx) * ty * g(i, j + 1) + tx * ty * g(i + 1, j + 1);
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<char, 4> kMagic{'T', 'F', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put_le(std::ostream& os, T v) {
  std::array<char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& is) {
  std::array<char, sizeof(T)> bytes{};
  if (!is.read(bytes.data(), bytes.size())) throw InvalidArgument("read_field: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

std::string fmt(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v + 0.0);  // no "-0"
  return std::string(buf.data(), ptr);
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  return os;
}

}  // namespace

void append_field(std::ostream& os, const Field& f) {
  const auto& g = f.geometry();
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, kVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.ny));
  put_le<double>(os, g.dx);
  put_le<double>(os, g.dy);
  for (const auto& v : f.samples()) {
    put_le<double>(os, v.real());
    put_le<double>(os, v.imag());
  }
}

void write_field(const std::filesystem::path& path, const Field& f) {
  auto os = open_out(path, true);
  append_field(os, f);
}

Field read_field(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
    throw InvalidArgument("read_field: bad magic");
  }
  if (get_le<std::uint32_t>(is) != kVersion) throw InvalidArgument("read_field: unsupported version");
  const auto nx = get_le<std::uint32_t>(is);
  const auto ny = get_le<std::uint32_t>(is);
  const auto dx = get_le<double>(is);
  const auto dy = get_le<double>(is);
  Field f(make_geometry(nx, ny, dx, dy), cplx{});
  for (auto& v : f.samples()) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    v = {re, im};
  }
  return f;
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("read_field: cannot open " + path.string());
  return read_field(is);
}

void write_radial_csv(const std::filesystem::path& path, const RadialProfile& p) {
  auto os = open_out(path, false);
  os << "# rho_m,intensity\n";
  for (std::size_t k = 0; k < p.radii.size(); ++k) os << fmt(p.radii[k]) << ',' << fmt(p.values[k]) << '\n';
}

void write_axial_csv(const std::filesystem::path& path, const AxialProfile& p) {
  auto os = open_out(path, false);
  os << "# z_m,intensity\n";
  for (std::size_t k = 0; k < p.z_values.size(); ++k) {
    os << fmt(p.z_values[k]) << ',' << fmt(p.values[k]) << '\n';
  }
}

void write_pgm(const std::filesystem::path& path, const RealGrid& g) {
  auto os = open_out(path, true);
  os << "P5\n" << g.nx() << ' ' << g.ny() << "\n255\n";
  double peak = 0.0;
  for (double v : g.samples()) peak = std::max(peak, v);
  std::vector<unsigned char> row(g.nx());
  // PGM rows run top to bottom; grid j increases with y, so emit j descending.
  for (std::size_t jj = 0; jj < g.ny(); ++jj) {
    const std::size_t j = g.ny() - 1 - jj;
    for (std::size_t i = 0; i < g.nx(); ++i) {
      const double v = peak > 0.0 ? std::clamp(g(i, j) / peak, 0.0, 1.0) : 0.0;
      row[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace trapgen
