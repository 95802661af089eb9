#include "trapgen/sweep.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "json.hpp"
#include "trapgen/error.hpp"
#include "trapgen/parallel.hpp"

namespace trapgen {

namespace {

std::string fmt(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v + 0.0);  // no "-0"
  return std::string(buf.data(), ptr);
}

double centre_darkness(cplx t_a, cplx t_b, double b_units, const SystemSpec& sys, double a) {
  MaskParams m;
  m.a = a;
  m.d = 2.0 * a;
  m.t_a = t_a;
  m.t_b = t_b;
  const double b = iris_radius(b_units * bessel_zero(1, 1), sys, a);
  const double ref = std::norm(t_b) * std::pow(sys.f1 / sys.f2, 2);
  return std::norm(dark_center_field(m, sys, b)) / ref;
}

}  // namespace

void Range::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw InvalidArgument("range: bounds must be finite");
  if (n == 0) throw InvalidArgument("range: empty (n = 0)");
  if (n == 1 && lo != hi) throw InvalidArgument("range: n = 1 needs lo == hi");
  if (n > 1 && !(hi > lo)) throw InvalidArgument("range: hi must exceed lo");
}

std::vector<double> Range::values() const {
  validate();
  std::vector<double> out(n, lo);
  for (std::size_t i = 1; i < n; ++i) {
    const double m = static_cast<double>(n - 1), s = static_cast<double>(i);
    out[i] = (lo * (m - s) + hi * s) / m;
  }
  if (n > 1) out.back() = hi;
  return out;
}

SweepGrid darkness_map(double t_a_mag, const SystemSpec& sys, double a, const Range& phi, const Range& b,
                       double t_b, std::size_t threads) {
  sys.validate();
  if (!(a > 0.0)) throw InvalidArgument("darkness_map: a must be positive");
  if (!(t_a_mag >= 0.0)) throw InvalidArgument("darkness_map: |t_a| must be >= 0");
  if (t_b == 0.0) throw InvalidArgument("darkness_map: t_b must be nonzero");
  for (double v : b.values()) {
    if (v < 0.0) throw InvalidArgument("darkness_map: b must be >= 0");
  }
  SweepGrid g;
  g.phi_values = phi.values();
  g.b_values = b.values();
  g.darkness.assign(g.phi_values.size() * g.b_values.size(), 0.0);
  parallel_for(g.phi_values.size(), threads, [&](std::size_t ip) {
    const cplx ta = std::polar(t_a_mag, g.phi_values[ip]);
    for (std::size_t ib = 0; ib < g.b_values.size(); ++ib) {
      g.darkness[ip * g.b_values.size() + ib] = centre_darkness(ta, t_b, g.b_values[ib], sys, a);
    }
  });
  return g;
}

DarkestB find_darkest_b(cplx t_a, const SystemSpec& sys, double a, double lo, double hi, cplx t_b) {
  sys.validate();
  if (!(lo >= 0.0) || !(hi > lo)) throw InvalidArgument("find_darkest_b: need 0 <= lo < hi");
  if (t_b == cplx{}) throw InvalidArgument("find_darkest_b: t_b must be nonzero");
  const auto f = [&](double b) { return centre_darkness(t_a, t_b, b, sys, a); };

  constexpr int kScan = 64;
  const double step = (hi - lo) / kScan;
  int best = 0;
  double best_v = f(lo);
  for (int i = 1; i <= kScan; ++i) {
    const double v = f(lo + step * i);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double x0 = lo + step * std::max(best - 1, 0);
  double x3 = lo + step * std::min(best + 1, kScan);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = x3 - r * (x3 - x0), x2 = x0 + r * (x3 - x0);
  double f1 = f(x1), f2 = f(x2);
  while (x3 - x0 > 1e-12 * std::max(1.0, std::abs(x3))) {
    if (f1 < f2) {
      x3 = x2;
      x2 = x1;
      f2 = f1;
      x1 = x3 - r * (x3 - x0);
      f1 = f(x1);
    } else {
      x0 = x1;
      x1 = x2;
      f1 = f2;
      x2 = x0 + r * (x3 - x0);
      f2 = f(x2);
    }
  }
  DarkestB out;
  out.b = 0.5 * (x0 + x3);
  out.darkness = f(out.b);
  // The refined point can never be worse than the prescan.
  if (best_v < out.darkness) {
    out.b = lo + step * best;
    out.darkness = best_v;
  }
  const double edge_tol = 1e-6 * (hi - lo);
  out.at_boundary = out.b - lo < edge_tol || hi - out.b < edge_tol;
  return out;
}

MaskSpec design_dual_mask(double alpha_bright, double alpha_dark, double a, double d, std::size_t grid_n,
                          DarkVariant variant) {
  const double t_b = dual_species_balance(alpha_bright, alpha_dark, variant);
  MaskSpec spec;
  spec.kind = MaskKind::Dual;
  spec.grid_n = grid_n;
  spec.params.a = a;
  spec.params.d = d;
  spec.params.t_a = 1.0;
  spec.params.t_b = t_b;
  DualSites dual;
  if (variant == DarkVariant::Opaque) {
    dual.t_a = 0.0;
    dual.radius_ratio = bessel_zero(0, 1) / bessel_zero(1, 1);
  } else {
    // Unit system: the iris sits at x1 for the bright aperture radius.
    const SystemSpec unit{1.0, 1.0, 2.0 * kPi};
    dual.t_a = dark_condition_ta(bessel_zero(1, 1), unit, 1.0) * t_b;
    dual.radius_ratio = 1.0;
  }
  spec.dual = dual;
  spec.validate();
  return spec;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepGrid& grid, double t_a_mag, double t_b,
                     const SystemSpec& sys, double a) {
  {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os << "phi_rad\\b_x1";
    for (double b : grid.b_values) os << ',' << fmt(b);
    os << '\n';
    for (std::size_t ip = 0; ip < grid.phi_values.size(); ++ip) {
      os << fmt(grid.phi_values[ip]);
      for (std::size_t ib = 0; ib < grid.b_values.size(); ++ib) os << ',' << fmt(grid.at(ip, ib));
      os << '\n';
    }
  }
  nlohmann::ordered_json j;
  j["t_a_magnitude"] = t_a_mag;
  j["t_b"] = t_b;
  j["a_m"] = a;
  j["f1_m"] = sys.f1;
  j["f2_m"] = sys.f2;
  j["lambda_m"] = sys.lambda;
  j["b_unit_m"] = iris_radius(bessel_zero(1, 1), sys, a);
  j["phi_rad"] = {{"lo", grid.phi_values.front()}, {"hi", grid.phi_values.back()}, {"n", grid.phi_values.size()}};
  j["b_x1"] = {{"lo", grid.b_values.front()}, {"hi", grid.b_values.back()}, {"n", grid.b_values.size()}};
  j["darkness"] = "|A2(0)|^2 / ((f1/f2)^2 |t_b|^2 |A0|^2)";
  std::ofstream js(path.string() + ".json");
  if (!js) throw Error("cannot open " + path.string() + ".json for writing");
  js << j.dump(2) << '\n';
}

}  // namespace trapgen
