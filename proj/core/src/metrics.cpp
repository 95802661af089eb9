#include "trapgen/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "linalg.hpp"
#include "trapgen/analytic.hpp"
#include "trapgen/error.hpp"

namespace trapgen {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) throw InvalidProfile("median of an empty set");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

// Visits samples within radius r of c.
template <class Fn>
void for_disk(const RealGrid& g, Point c, double r, Fn&& fn) {
  const auto& geom = g.geometry();
  const auto clampi = [](double v, std::size_t n) {
    return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n - 1)));
  };
  const std::size_t i0 = clampi(std::floor((c.x - r - geom.x(0)) / geom.dx), geom.nx);
  const std::size_t i1 = clampi(std::ceil((c.x + r - geom.x(0)) / geom.dx), geom.nx);
  const std::size_t j0 = clampi(std::floor((c.y - r - geom.y(0)) / geom.dy), geom.ny);
  const std::size_t j1 = clampi(std::ceil((c.y + r - geom.y(0)) / geom.dy), geom.ny);
  for (std::size_t j = j0; j <= j1; ++j) {
    const double dy = geom.y(j) - c.y;
    for (std::size_t i = i0; i <= i1; ++i) {
      const double dx = geom.x(i) - c.x;
      const double rr = std::sqrt(dx * dx + dy * dy);
      if (rr <= r) fn(rr, g(i, j));
    }
  }
}

std::string fmt(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v + 0.0);  // no "-0"
  return std::string(buf.data(), ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

std::vector<SiteDarkness> site_darkness(const RealGrid& plane, const std::vector<Point>& centers,
                                        double probe_radius, double a_img) {
  if (!(probe_radius > 0.0) || !(a_img > 0.0)) {
    throw InvalidArgument("site_darkness: probe radius and a_img must be positive");
  }
  if (probe_radius >= 2.0 * a_img) {
    throw GeometryError("site_darkness: probe radius reaches the background annulus at 2 a_img");
  }
  const auto& geom = plane.geometry();
  const double outer = 2.5 * a_img;
  for (std::size_t s = 0; s < centers.size(); ++s) {
    const auto& c = centers[s];
    if (!geom.contains(c)) throw InvalidArgument("site_darkness: centre outside grid");
    if (c.x - outer < geom.x(0) || c.x + outer > geom.x(geom.nx - 1) || c.y - outer < geom.y(0) ||
        c.y + outer > geom.y(geom.ny - 1)) {
      throw GeometryError("site_darkness: background annulus leaves the grid");
    }
    for (std::size_t t = s + 1; t < centers.size(); ++t) {
      if (std::hypot(c.x - centers[t].x, c.y - centers[t].y) < outer + probe_radius) {
        throw GeometryError("site_darkness: background annulus of one site overlaps the probe of another");
      }
    }
  }

  std::vector<SiteDarkness> out;
  out.reserve(centers.size());
  for (const auto& c : centers) {
    double sum = 0.0;
    std::size_t count = 0;
    std::vector<double> ring;
    for_disk(plane, c, outer, [&](double r, double v) {
      if (r <= probe_radius) {
        sum += v;
        ++count;
      }
      if (r >= 2.0 * a_img) ring.push_back(v);
    });
    SiteDarkness s;
    s.center = c;
    s.probe_mean = count > 0 ? sum / static_cast<double>(count) : sample_bilinear(plane, c);
    if (ring.empty()) throw GeometryError("site_darkness: background annulus holds no samples");
    s.background = median(std::move(ring));
    if (!(s.background > 0.0)) throw InvalidProfile("site_darkness: background intensity is zero");
    s.darkness = s.probe_mean / s.background;
    out.push_back(s);
  }
  return out;
}

double site_contrast(const RealGrid& plane, const std::vector<Point>& centers, double probe_radius,
                     double a_img) {
  const auto sites = site_darkness(plane, centers, probe_radius, a_img);
  if (sites.empty()) throw InvalidArgument("site_contrast: no sites");
  double sum = 0.0;
  for (const auto& s : sites) sum += (s.background - s.probe_mean) / s.background;
  return sum / static_cast<double>(sites.size());
}

PowerLawFit fit_power_law(const RadialProfile& profile, double clip_fraction) {
  if (!(clip_fraction > 0.0) || clip_fraction > 1.0) {
    throw InvalidArgument("fit_power_law: clip fraction must lie in (0, 1]");
  }
  const auto& r = profile.radii;
  const auto& v = profile.values;
  if (r.size() != v.size() || r.empty()) throw InvalidProfile("fit_power_law: malformed profile");
  const auto imax = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  const double clip = clip_fraction * v[imax];

  std::vector<double> xs, ys;
  for (std::size_t k = 0; k <= imax; ++k) {
    if (v[k] <= clip) {
      xs.push_back(r[k]);
      ys.push_back(v[k]);
    }
  }
  if (xs.size() < 8) {
    throw InvalidProfile("fit_power_law: only " + std::to_string(xs.size()) +
                         " points below the clip level, need at least 8");
  }
  const double rs = *std::max_element(xs.begin(), xs.end());
  const double ysc = std::max(*std::max_element(ys.begin(), ys.end()), 1e-300);
  for (auto& x : xs) x /= rs;
  for (auto& y : ys) y /= ysc;

  // Moment-style start: offset at the minimum, slope of the log-log cloud.
  const double b0 = *std::min_element(ys.begin(), ys.end());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k] <= 0.0 || ys[k] - b0 <= 1e-9) continue;
    const double lx = std::log(xs[k]), ly = std::log(ys[k] - b0);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  double alpha0 = 2.0, amp0 = 1.0;
  if (n >= 2) {
    const double den = static_cast<double>(n) * sxx - sx * sx;
    if (den > 0.0) {
      alpha0 = std::clamp((static_cast<double>(n) * sxy - sx * sy) / den, 0.2, 20.0);
      amp0 = std::exp((sy - alpha0 * sx) / static_cast<double>(n));
    }
  }

  const detail::ModelFn model = [](double x, const std::vector<double>& p, std::vector<double>& g) {
    const double xa = x > 0.0 ? std::pow(x, p[1]) : 0.0;
    g[0] = xa;
    g[1] = x > 0.0 ? p[0] * xa * std::log(x) : 0.0;
    g[2] = 1.0;
    return p[0] * xa + p[2];
  };
  const auto res = detail::levenberg_marquardt(xs, ys, {amp0, alpha0, b0}, model);
  PowerLawFit out;
  out.alpha = res.params[1];
  out.amplitude = res.params[0] * ysc / std::pow(rs, out.alpha);
  out.offset = res.params[2] * ysc;
  out.points = xs.size();
  if (!(out.alpha > 0.0) || !std::isfinite(out.alpha)) {
    throw NumericalFailure("fit_power_law: fit converged to a non-positive exponent");
  }
  return out;
}

double profile_background(const RadialProfile& profile) {
  const auto n = profile.values.size();
  if (n < 4) throw InvalidProfile("profile_background: profile too short");
  return median(std::vector<double>(profile.values.begin() + static_cast<std::ptrdiff_t>(3 * n / 4),
                                    profile.values.end()));
}

WaistFit fit_waist(const RadialProfile& profile, WaistModel model) {
  const auto& r = profile.radii;
  const auto& v = profile.values;
  if (r.size() != v.size() || r.size() < 8) throw InvalidProfile("fit_waist: profile too short");
  const double bg = profile_background(profile);
  if (model == WaistModel::Auto) model = v.front() > bg ? WaistModel::Gaussian : WaistModel::DarkQuartic;

  std::vector<double> xs, ys;
  const double rs = r.back();
  WaistFit out;
  out.model = model;

  if (model == WaistModel::Gaussian) {
    const double peak = *std::max_element(v.begin(), v.end());
    for (double frac : {0.9, 0.8, 0.6, 0.4}) {
      xs.clear();
      ys.clear();
      for (std::size_t k = 0; k < r.size() && v[k] >= frac * peak; ++k) {
        xs.push_back(r[k] / rs);
        ys.push_back(v[k] / peak);
      }
      if (xs.size() >= 4) break;
    }
    if (xs.size() < 4) throw InvalidProfile("fit_waist: bright core spans fewer than 4 points");
    // Start from the outermost core point.
    const double w0 = xs.back() * std::sqrt(-2.0 / std::log(std::max(ys.back(), 1e-6)));
    const detail::ModelFn f = [](double x, const std::vector<double>& p, std::vector<double>& g) {
      const double e = std::exp(-2.0 * x * x / (p[1] * p[1]));
      g[0] = e;
      g[1] = p[0] * e * 4.0 * x * x / (p[1] * p[1] * p[1]);
      return p[0] * e;
    };
    const auto res = detail::levenberg_marquardt(xs, ys, {1.0, std::max(w0, 1e-3)}, f);
    out.amplitude = res.params[0] * peak;
    out.w0 = std::abs(res.params[1]) * rs;
    out.points = xs.size();
    return out;
  }

  const double vmin = *std::min_element(v.begin(), v.end());
  if (!(bg > vmin)) throw InvalidProfile("fit_waist: dark profile has no contrast");
  for (double frac : {0.1, 0.2, 0.4}) {
    xs.clear();
    ys.clear();
    for (std::size_t k = 0; k < r.size() && v[k] - vmin <= frac * (bg - vmin); ++k) {
      xs.push_back(r[k] / rs);
      ys.push_back(v[k] / bg);
    }
    if (xs.size() >= 4) break;
  }
  if (xs.size() < 4) throw InvalidProfile("fit_waist: dark core spans fewer than 4 points");
  const bool quartic = model == WaistModel::DarkQuartic;
  const detail::ModelFn f = [quartic](double x, const std::vector<double>& p, std::vector<double>& g) {
    const double w = p[0];
    if (quartic) {
      const double e = std::exp(-x * x / (w * w));
      g[0] = 2.0 * (1.0 - e) * (-e) * 2.0 * x * x / (w * w * w);
      g[1] = 1.0;
      return (1.0 - e) * (1.0 - e) + p[1];
    }
    const double e = std::exp(-2.0 * x * x / (w * w));
    g[0] = -e * 4.0 * x * x / (w * w * w);
    g[1] = 1.0;
    return 1.0 - e + p[1];
  };
  // Start from the outermost core point assuming the model's leading term.
  const double y_last = std::max(ys.back() - ys.front(), 1e-6);
  const double w_start = quartic ? xs.back() / std::pow(y_last, 0.25) : xs.back() * std::sqrt(2.0 / y_last);
  const auto res = detail::levenberg_marquardt(xs, ys, {w_start, ys.front()}, f);
  out.w0 = std::abs(res.params[0]) * rs;
  out.amplitude = bg;
  out.offset = res.params[1] * bg;
  out.points = xs.size();
  return out;
}

double fit_gaussian_waist(const RadialProfile& profile, WaistModel model) {
  return fit_waist(profile, model).w0;
}

DivergenceFit fit_divergence(const AxialProfile& axial, double w0, double lambda, TrapSign sign,
                             double reference) {
  if (!(w0 > 0.0) || !(lambda > 0.0)) throw InvalidArgument("divergence_parameter: w0 and lambda must be positive");
  if (axial.z_values.size() != axial.values.size() || axial.z_values.size() < 5) {
    throw InvalidProfile("divergence_parameter: need at least 5 axial samples");
  }
  const double zR = kPi * w0 * w0 / lambda;
  std::vector<double> u(axial.z_values.size());
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = axial.z_values[k] / zR;
  if (u.front() > -0.3 || u.back() < 0.3) {
    throw InvalidArgument("divergence_parameter: axial profile must span at least +/-0.3 zR");
  }
  auto poly = detail::polyfit(u, axial.values, 4);
  double ref = reference;
  if (sign == TrapSign::Bright && ref <= 0.0) ref = poly[0];
  if (!(ref > 0.0)) throw InvalidProfile("divergence_parameter: dark profiles need a positive reference intensity");
  for (auto& c : poly) c /= ref;

  DivergenceFit out;
  out.poly = poly;
  out.c2 = poly[2];
  const double curvature = sign == TrapSign::Bright ? -out.c2 : out.c2;
  if (!(curvature > 0.0)) {
    throw InvalidProfile("divergence_parameter: axial curvature has the wrong sign for this trap type");
  }
  out.h = 1.0 / std::sqrt(curvature);
  return out;
}

double divergence_parameter(const AxialProfile& axial, double w0, double lambda, TrapSign sign,
                            double reference) {
  return fit_divergence(axial, w0, lambda, sign, reference).h;
}

double trap_depth(double intensity, double alpha0) {
  if (intensity < 0.0) throw InvalidArgument("trap_depth: intensity must be >= 0");
  return alpha0 * intensity;
}

std::size_t nearest_plane(const Volume& v, double z, double tol_fraction) {
  if (v.z_values.empty()) throw RangeError("nearest_plane: volume has no planes");
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.z_values.size(); ++k) {
    if (std::abs(v.z_values[k] - z) < std::abs(v.z_values[best] - z)) best = k;
  }
  if (std::abs(v.z_values[best] - z) > tol_fraction * std::abs(z)) {
    throw RangeError("nearest_plane: no plane within " + std::to_string(100.0 * tol_fraction) + "% of z = " +
                     std::to_string(z) + " m");
  }
  return best;
}

double talbot_suppression(const Volume& coherent, const Volume& incoherent, double z_talbot,
                          const std::vector<Point>& centers, double probe_radius, double a_img) {
  const auto pc = nearest_plane(coherent, z_talbot);
  const auto pi = nearest_plane(incoherent, z_talbot);
  const double cc = site_contrast(coherent.planes[pc], centers, probe_radius, a_img);
  const double ci = site_contrast(incoherent.planes[pi], centers, probe_radius, a_img);
  if (cc == 0.0) throw InvalidProfile("talbot_suppression: coherent Talbot plane has zero contrast");
  return ci / cc;
}

double normalized_cross_correlation(const RealGrid& a, const RealGrid& b, double half_width) {
  if (!(a.geometry() == b.geometry())) throw InvalidArgument("ncc: grids differ in geometry");
  const auto& g = a.geometry();
  double sa = 0, sb = 0;
  std::size_t n = 0;
  auto inside = [&](std::size_t i, std::size_t j) {
    return std::abs(g.x(i)) <= half_width && std::abs(g.y(j)) <= half_width;
  };
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      if (!inside(i, j)) continue;
      sa += a(i, j);
      sb += b(i, j);
      ++n;
    }
  }
  if (n < 2) throw InvalidArgument("ncc: window holds fewer than 2 samples");
  const double ma = sa / static_cast<double>(n), mb = sb / static_cast<double>(n);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      if (!inside(i, j)) continue;
      const double da = a(i, j) - ma, db = b(i, j) - mb;
      sab += da * db;
      saa += da * da;
      sbb += db * db;
    }
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

Revival locate_revival(const Volume& v, const RealGrid& reference, double half_width) {
  std::vector<double> score(v.planes.size(), -std::numeric_limits<double>::infinity());
  std::size_t first = v.planes.size();
  for (std::size_t k = 0; k < v.planes.size(); ++k) {
    if (!(v.z_values[k] > 0.0)) continue;
    score[k] = normalized_cross_correlation(v.planes[k], reference, half_width);
    first = std::min(first, k);
  }
  if (first == v.planes.size()) throw RangeError("locate_revival: no planes with z > 0");
  // The correlation near focus is high only because the pattern has not yet
  // evolved; skip past its first local minimum. Sparse scans of one or two
  // chosen planes are taken as they are.
  std::size_t start = first;
  if (v.planes.size() - first >= 3) {
    while (start + 1 < v.planes.size() && score[start + 1] <= score[start]) ++start;
    if (start + 1 >= v.planes.size()) throw RangeError("locate_revival: correlation never recovers within the scan");
  }
  Revival best;
  best.ncc = -std::numeric_limits<double>::infinity();
  for (std::size_t k = start; k < v.planes.size(); ++k) {
    if (score[k] > best.ncc) {
      best.ncc = score[k];
      best.plane = k;
    }
  }
  if (!std::isfinite(best.ncc)) throw RangeError("locate_revival: no planes with z > 0");
  best.z = v.z_values[best.plane];
  const std::size_t k = best.plane;
  if (k > 0 && k + 1 < v.planes.size() && std::isfinite(score[k - 1]) && std::isfinite(score[k + 1])) {
    const double z0 = v.z_values[k - 1], z1 = v.z_values[k], z2 = v.z_values[k + 1];
    const double s0 = score[k - 1], s1 = score[k], s2 = score[k + 1];
    // Vertex of the parabola through the three samples.
    const double num = (z1 - z0) * (z1 - z0) * (s1 - s2) - (z1 - z2) * (z1 - z2) * (s1 - s0);
    const double den = (z1 - z0) * (s1 - s2) - (z1 - z2) * (s1 - s0);
    if (den != 0.0) best.z = std::clamp(z1 - 0.5 * num / den, z0, z2);
  }
  return best;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<TrapMetrics>& rows) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << "center_x_m,center_y_m,center_I,background_I,darkness,w0_fit_m,alpha_fit,h_fit,U0_uK,omega_rho_Hz,"
        "omega_z_Hz\n";
  const auto hz = [](const std::optional<double>& w) -> std::optional<double> {
    if (!w) return std::nullopt;
    return *w / (2.0 * kPi);
  };
  for (const auto& m : rows) {
    os << fmt(m.site_center.x) << ',' << fmt(m.site_center.y) << ',' << fmt(m.center_intensity) << ','
       << fmt(m.background_intensity) << ',' << fmt(m.darkness) << ',' << fmt(m.w0_fit) << ','
       << fmt(m.alpha_fit) << ',' << fmt(m.h_fit) << ',' << fmt(m.depth_uK) << ',' << fmt(hz(m.omega_rho)) << ','
       << fmt(hz(m.omega_z)) << '\n';
  }
}

}  // namespace trapgen
