#include "commands.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <tuple>
#include <vector>

#include "config.hpp"
#include "json.hpp"
#include "trapgen/analytic.hpp"
#include "trapgen/error.hpp"
#include "trapgen/grid.hpp"
#include "trapgen/incoherent.hpp"
#include "trapgen/metrics.hpp"
#include "trapgen/optics.hpp"
#include "trapgen/sweep.hpp"

#ifndef TRAPGEN_VERSION
#define TRAPGEN_VERSION "unknown"
#endif

namespace trapgen::cli {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string shortest(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v + 0.0);  // no "-0"
  return std::string(buf.data(), ptr);
}

// Writers queued during a run; nothing touches the disk until commit().
class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::function<void(const fs::path&)> writer) {
    names_.push_back(name);
    writers_.push_back(std::move(writer));
  }
  void add_text(const std::string& name, std::string text) {
    add(name, [text = std::move(text)](const fs::path& p) {
      std::ofstream os(p, std::ios::binary);
      if (!os) throw Error("cannot open " + p.string() + " for writing");
      os << text;
    });
  }
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

  void commit() const {
    fs::create_directories(dir_);
    for (std::size_t i = 0; i < writers_.size(); ++i) writers_[i](dir_ / names_[i]);
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
  std::vector<std::function<void(const fs::path&)>> writers_;
};

Json manifest(const std::string& command, const Document& doc, const RunOptions& opt) {
  Json m;
  m["tool"] = "trapgen";
  m["version"] = TRAPGEN_VERSION;
  m["command"] = command;
  m["config"] = doc.json;
  if (opt.seed) m["seed_override"] = *opt.seed;
  m["verify_fft"] = opt.verify_fft;
  return m;
}

Json system_json(const SystemSpec& s) { return {{"f1_m", s.f1}, {"f2_m", s.f2}, {"lambda_m", s.lambda}}; }

Json complex_json(cplx v) { return {{"re", v.real()}, {"im", v.imag()}}; }

Json mask_json(const MaskSpec& m) {
  static const char* kinds[] = {"bright", "dark", "dual"};
  Json j;
  j["kind"] = kinds[static_cast<int>(m.kind)];
  j["a_m"] = m.params.a;
  j["d_m"] = m.params.d;
  j["grid_n"] = m.grid_n;
  j["t_a"] = complex_json(m.params.t_a);
  j["t_b"] = complex_json(m.params.t_b);
  j["phi_ab_rad"] = m.params.phi_ab;
  if (m.dual) {
    j["dual"] = {{"t_a", complex_json(m.dual->t_a)},
                 {"phi_ab_rad", m.dual->phi_ab},
                 {"radius_ratio", m.dual->radius_ratio}};
  }
  return j;
}

Json filter_json(const FilterSpec& f) {
  static const char* kinds[] = {"none", "iris", "zone"};
  Json j;
  j["kind"] = kinds[static_cast<int>(f.kind)];
  if (f.kind != FilterKind::None) j["b_m"] = std::isinf(f.b) ? Json("inf") : Json(f.b);
  auto rings = Json::array();
  for (const auto& [lo, hi] : f.rings) rings.push_back({lo, hi});
  if (f.kind == FilterKind::Zone) j["rings_m"] = rings;
  return j;
}

std::vector<Point> image_points(const std::vector<Point>& mask_points, const SystemSpec& sys) {
  std::vector<Point> out;
  out.reserve(mask_points.size());
  for (const auto& p : mask_points) out.push_back(image_point(p, sys));
  return out;
}

double profile_reach(const Geometry& g, Point c, double cap) {
  const double edge = std::min({c.x - g.x(0), g.x(g.nx - 1) - c.x, c.y - g.y(0), g.y(g.ny - 1) - c.y});
  return std::min(cap, edge);
}

struct SiteSet {
  std::vector<Point> centers;  // image plane
  TrapSign sign = TrapSign::Bright;
  double a_img = 0.0;
};

struct SiteResult {
  TrapMetrics metrics;
  RadialProfile radial;
  std::optional<AxialProfile> axial;
};

std::vector<SiteResult> measure_sites(const SiteSet& set, const RealGrid& focal, const Volume* volume,
                                      double pitch_img, const SimulateConfig& cfg,
                                      std::vector<std::string>& warnings) {
  std::vector<SiteResult> out;
  if (set.centers.empty()) return out;
  const double probe = cfg.metrics.probe_fraction * set.a_img;
  const auto dark = site_darkness(focal, set.centers, probe, set.a_img);
  const auto& g = focal.geometry();
  const double half_pitch = cfg.mask.grid_n > 1 ? 0.5 * pitch_img : INFINITY;
  const double lambda = cfg.sys.lambda;

  for (std::size_t s = 0; s < set.centers.size(); ++s) {
    SiteResult r;
    auto& m = r.metrics;
    const Point c = set.centers[s];
    m.site_center = c;
    m.center_intensity = sample_bilinear(focal, c);
    m.background_intensity = dark[s].background;
    m.darkness = dark[s].darkness;

    const double reach = profile_reach(g, c, std::min(4.0 * set.a_img, half_pitch));
    const auto bins = std::max<std::size_t>(64, static_cast<std::size_t>(2.0 * reach / g.dx));
    r.radial = radial_profile(focal, c, bins, reach);
    const auto wf = fit_waist(r.radial);
    m.w0_fit = wf.w0;

    if (set.sign == TrapSign::Dark) {
      try {
        m.alpha_fit = fit_power_law(r.radial).alpha;
      } catch (const InvalidProfile& e) {
        warnings.push_back("site " + std::to_string(s) + ": " + e.what());
      }
    }
    if (volume != nullptr) {
      AxialProfile ax;
      ax.z_values = volume->z_values;
      for (const auto& plane : volume->planes) ax.values.push_back(sample_bilinear(plane, c));
      try {
        const double ref = set.sign == TrapSign::Dark ? m.background_intensity : 0.0;
        m.h_fit = divergence_parameter(ax, m.w0_fit, lambda, set.sign, ref);
      } catch (const InvalidArgument& e) {
        warnings.push_back("site " + std::to_string(s) + ": " + e.what());
      } catch (const InvalidProfile& e) {
        warnings.push_back("site " + std::to_string(s) + ": " + e.what());
      }
      r.axial = std::move(ax);
    }
    if (cfg.metrics.alpha0) {
      // Bright traps are as deep as their peak, dark ones as their surroundings.
      const double rel = set.sign == TrapSign::Bright ? m.center_intensity : m.background_intensity;
      m.depth_uK = trap_depth(rel * *cfg.metrics.input_intensity, *cfg.metrics.alpha0);
      if (cfg.metrics.mass && *m.depth_uK > 0.0) {
        const double U0 = *m.depth_uK * 1e-6 * kBoltzmann;
        const double mass = *cfg.metrics.mass;
        if (set.sign == TrapSign::Bright) m.omega_rho = 2.0 / m.w0_fit * std::sqrt(U0 / mass);
        if (m.h_fit) {
          const double zR = kPi * m.w0_fit * m.w0_fit / lambda;
          m.omega_z = std::sqrt(2.0 * U0 / mass) / (*m.h_fit * zR);
        }
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Analytic single-site profile on the same radii, for --verify-fft.
double analytic_rms(const RadialProfile& fft, const MaskSpec& mask, const FilterSpec& filter, const SystemSpec& sys,
                    double a_img, double scale) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < fft.radii.size(); ++k) {
    if (fft.radii[k] > 2.0 * a_img) break;
    const double exact = std::norm(mask_field(fft.radii[k], 0.0, mask.params, sys, filter.b));
    sum += std::pow((fft.values[k] - exact) / scale, 2);
    ++n;
  }
  return n > 0 ? std::sqrt(sum / static_cast<double>(n)) : 0.0;
}

std::vector<double> with_zero(std::vector<double> z) {
  if (std::find(z.begin(), z.end(), 0.0) == z.end()) {
    z.push_back(0.0);
    std::sort(z.begin(), z.end());
  }
  return z;
}

}  // namespace

void cmd_simulate(const RunOptions& opt, std::ostream& log) {
  const auto doc = load_document(opt.config_path);
  const auto cfg = parse_simulate(doc);

  const Geometry geom = make_geometry(cfg.grid.n, cfg.grid.n, cfg.grid.dx, cfg.grid.dx);
  const Field mask_field = render_mask(cfg.mask, geom);
  const Field input(geom, cplx{1.0, 0.0});
  const Field focal = propagate_4f(input, mask_field, cfg.filter, cfg.sys);
  const RealGrid I = intensity(focal);

  std::optional<Volume> volume;
  if (cfg.scan) volume = axial_scan(focal, cfg.scan->z_values, cfg.sys.lambda, opt.threads);

  const double mag = cfg.sys.magnification();
  const double a_img = cfg.mask.params.a * mag;
  const double pitch_img = cfg.mask.params.d * mag;
  std::vector<std::string> warnings;
  if (volume) warnings = volume->warnings;

  SiteSet primary{image_points(cfg.mask.site_centers(), cfg.sys),
                  cfg.mask.kind == MaskKind::Dark ? TrapSign::Dark : TrapSign::Bright, a_img};
  auto sites = measure_sites(primary, I, volume ? &*volume : nullptr, pitch_img, cfg, warnings);
  if (cfg.mask.kind == MaskKind::Dual) {
    SiteSet dual{image_points(cfg.mask.dual_centers(), cfg.sys), TrapSign::Dark, a_img * cfg.mask.dual->radius_ratio};
    auto more = measure_sites(dual, I, volume ? &*volume : nullptr, pitch_img, cfg, warnings);
    for (auto& s : more) sites.push_back(std::move(s));
  }

  Json m = manifest("simulate", doc, opt);
  m["resolved"] = {{"system", system_json(cfg.sys)},
                   {"mask", mask_json(cfg.mask)},
                   {"filter", filter_json(cfg.filter)},
                   {"grid", {{"n", cfg.grid.n}, {"dx_m", cfg.grid.dx}, {"image_dx_m", focal.geometry().dx}}}};

  if (opt.verify_fft) {
    const bool single = cfg.mask.grid_n == 1 && cfg.mask.kind != MaskKind::Dual && cfg.filter.kind == FilterKind::Iris;
    if (single) {
      const double scale = primary.sign == TrapSign::Bright ? sites.front().metrics.center_intensity
                                                            : sites.front().metrics.background_intensity;
      const double rms = analytic_rms(sites.front().radial, cfg.mask, cfg.filter, cfg.sys, a_img, scale);
      m["verification"] = {{"radial_rms_vs_analytic", rms}, {"window", "rho <= 2 a_img"}};
      log << "verify-fft: radial rms vs analytic = " << shortest(rms) << '\n';
    } else {
      m["verification"] = "skipped: analytic comparison needs a single-site iris configuration";
      log << "verify-fft: skipped (needs a single-site iris configuration)\n";
    }
  }
  m["warnings"] = warnings;
  for (const auto& w : warnings) log << "warning: " << w << '\n';

  Artifacts out(opt.out_dir);
  out.add("focal_field.tfld", [&](const fs::path& p) { write_field(p, focal); });
  out.add("focal_intensity.pgm", [&](const fs::path& p) { write_pgm(p, I); });
  out.add("radial_profile.csv", [&](const fs::path& p) { write_radial_csv(p, sites.front().radial); });
  if (sites.front().axial) {
    out.add("axial_profile.csv", [&](const fs::path& p) { write_axial_csv(p, *sites.front().axial); });
    out.add("volume.tfld", [&](const fs::path& p) { write_volume(p, *volume); });
  }
  std::vector<TrapMetrics> rows;
  for (const auto& s : sites) rows.push_back(s.metrics);
  out.add("metrics.csv", [&](const fs::path& p) { write_metrics_csv(p, rows); });
  auto names = out.names();
  if (volume) names.push_back("volume.tfld.json");
  names.push_back("manifest.json");
  m["outputs"] = names;
  out.add_text("manifest.json", m.dump(2) + "\n");
  out.commit();

  const auto& first = sites.front().metrics;
  log << "simulate: " << sites.size() << " site(s); first site I/I0 = " << shortest(first.center_intensity)
      << ", darkness = " << shortest(first.darkness) << ", w0 = " << shortest(first.w0_fit) << " m\n";
}

void cmd_talbot(const RunOptions& opt, std::ostream& log) {
  const auto doc = load_document(opt.config_path);
  auto cfg = parse_talbot(doc);
  if (opt.seed && cfg.source) cfg.source->seed = *opt.seed;

  const double mag = cfg.sys.magnification();
  const double d_img = cfg.mask.params.d * mag;
  const double a_img = cfg.mask.params.a * mag;
  const double zT = talbot_length(d_img, cfg.sys.lambda);
  const auto z = with_zero(cfg.scan.z_values);
  {
    Volume probe;
    probe.z_values = z;
    nearest_plane(probe, zT);  // fails fast when the scan misses the Talbot plane
  }

  const Geometry geom = make_geometry(cfg.grid.n, cfg.grid.n, cfg.grid.dx, cfg.grid.dx);
  const Field mask_field = render_mask(cfg.mask, geom);
  const auto centers = image_points(cfg.mask.site_centers(), cfg.sys);
  const double probe = cfg.probe_fraction * a_img;
  const std::size_t z0 = static_cast<std::size_t>(std::find(z.begin(), z.end(), 0.0) - z.begin());
  const double window = std::min(2.0, 0.5 * static_cast<double>(cfg.mask.grid_n)) * d_img;

  Json report;
  report["d_image_m"] = d_img;
  report["z_talbot_formula_m"] = zT;

  std::optional<Volume> coh, inc;
  if (cfg.coherent) {
    coh = coherent_volume(mask_field, cfg.filter, cfg.sys, z, opt.threads);
    const auto rev = locate_revival(*coh, coh->planes[z0], window);
    const auto at = nearest_plane(*coh, zT);
    report["coherent"] = {
        {"revival_z_m", rev.z},
        {"revival_rel_error", std::abs(rev.z - zT) / zT},
        {"revival_ncc", rev.ncc},
        {"ncc_at_formula_plane", normalized_cross_correlation(coh->planes[at], coh->planes[z0], window)},
        {"focal_contrast", site_contrast(coh->planes[z0], centers, probe, a_img)},
        {"talbot_contrast", site_contrast(coh->planes[at], centers, probe, a_img)}};
    log << "talbot: coherent revival at " << shortest(rev.z) << " m (formula " << shortest(zT) << " m), ncc "
        << shortest(rev.ncc) << '\n';
  }
  if (cfg.source) {
    inc = incoherent_volume(*cfg.source, mask_field, cfg.filter, cfg.sys, z, opt.threads);
    const auto at = nearest_plane(*inc, zT);
    const auto focal = site_darkness(inc->planes[z0], centers, probe, a_img);
    double mean = 0.0;
    for (const auto& s : focal) mean += s.darkness;
    mean /= static_cast<double>(focal.size());
    report["incoherent"] = {{"focal_darkness_mean", mean},
                            {"focal_contrast", site_contrast(inc->planes[z0], centers, probe, a_img)},
                            {"talbot_contrast", site_contrast(inc->planes[at], centers, probe, a_img)}};
    if (coh) {
      const double ratio = talbot_suppression(*coh, *inc, zT, centers, probe, a_img);
      report["suppression_ratio"] = ratio;
      log << "talbot: incoherent/coherent Talbot contrast = " << shortest(ratio) << '\n';
    }
    log << "talbot: incoherent focal darkness = " << shortest(mean) << '\n';
  }

  Json m = manifest("talbot", doc, opt);
  m["resolved"] = {{"system", system_json(cfg.sys)},
                   {"mask", mask_json(cfg.mask)},
                   {"filter", filter_json(cfg.filter)},
                   {"grid", {{"n", cfg.grid.n}, {"dx_m", cfg.grid.dx}}},
                   {"z_values_m", z}};
  std::vector<std::string> warnings;
  for (const Volume* v : {coh ? &*coh : nullptr, inc ? &*inc : nullptr}) {
    if (v == nullptr) continue;
    for (const auto& w : v->warnings) {
      if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
    }
  }
  m["warnings"] = warnings;
  for (const auto& w : warnings) log << "warning: " << w << '\n';

  Artifacts out(opt.out_dir);
  std::vector<std::string> extra;
  if (coh) {
    const auto at = nearest_plane(*coh, zT);
    out.add("coherent_volume.tfld", [&](const fs::path& p) { write_volume(p, *coh); });
    out.add("coherent_talbot.pgm", [&, at](const fs::path& p) { write_pgm(p, coh->planes[at]); });
    out.add("coherent_focal.pgm", [&](const fs::path& p) { write_pgm(p, coh->planes[z0]); });
    extra.push_back("coherent_volume.tfld.json");
  }
  if (inc) {
    const auto at = nearest_plane(*inc, zT);
    out.add("incoherent_volume.tfld", [&](const fs::path& p) { write_volume(p, *inc); });
    out.add("incoherent_talbot.pgm", [&, at](const fs::path& p) { write_pgm(p, inc->planes[at]); });
    out.add("incoherent_focal.pgm", [&](const fs::path& p) { write_pgm(p, inc->planes[z0]); });
    out.add_text("ensemble.json", ensemble_manifest(*cfg.source) + "\n");
    extra.push_back("incoherent_volume.tfld.json");
  }
  out.add_text("talbot_report.json", report.dump(2) + "\n");
  auto names = out.names();
  names.insert(names.end(), extra.begin(), extra.end());
  names.push_back("manifest.json");
  m["outputs"] = names;
  out.add_text("manifest.json", m.dump(2) + "\n");
  out.commit();
}

void cmd_sweep(const RunOptions& opt, std::ostream& log) {
  const auto doc = load_document(opt.config_path);
  const auto cfg = parse_sweep(doc);

  struct Result {
    double t_a;
    SweepGrid grid;
    std::size_t best_phi, best_b;
    std::optional<DarkestB> refined;
    Json verification;
  };
  std::vector<Result> results;
  for (double ta : cfg.t_a_magnitudes) {
    Result r{ta, darkness_map(ta, cfg.sys, cfg.a, cfg.phi, cfg.b, cfg.t_b, opt.threads), 0, 0, std::nullopt, nullptr};
    const auto it = std::min_element(r.grid.darkness.begin(), r.grid.darkness.end());
    const auto k = static_cast<std::size_t>(it - r.grid.darkness.begin());
    r.best_phi = k / r.grid.b_values.size();
    r.best_b = k % r.grid.b_values.size();
    const double phi = r.grid.phi_values[r.best_phi];
    const auto bracket = cfg.search ? *cfg.search : std::make_pair(cfg.b.lo, cfg.b.hi);
    if (bracket.second > bracket.first) {
      r.refined = find_darkest_b(std::polar(ta, phi), cfg.sys, cfg.a, bracket.first, bracket.second, cfg.t_b);
    }

    if (opt.verify_fft) {
      // FFT spot checks at the map corners and the optimum.
      constexpr std::size_t kN = 512;
      const Geometry geom = make_geometry(kN, kN, cfg.a / 16.0, cfg.a / 16.0);
      const Field input(geom, cplx{1.0, 0.0});
      auto check = [&](double p, double b_units) {
        MaskSpec m;
        m.kind = MaskKind::Dark;
        m.params = {cfg.a, 2.0 * cfg.a, std::polar(ta, p), cfg.t_b, 0.0};
        const auto out = propagate_4f(input, m, iris_filter(b_units, cfg.a, cfg.sys), cfg.sys);
        const double fft = std::norm(out(kN / 2, kN / 2)) / (std::pow(cfg.sys.f1 / cfg.sys.f2, 2) * cfg.t_b * cfg.t_b);
        const double exact = darkness_map(ta, cfg.sys, cfg.a, {p, p, 1}, {b_units, b_units, 1}, cfg.t_b, 1).darkness[0];
        return Json{{"phi_rad", p}, {"b_x1", b_units}, {"fft", fft}, {"analytic", exact}};
      };
      auto checks = Json::array();
      const auto& P = r.grid.phi_values;
      const auto& B = r.grid.b_values;
      for (double p : {P.front(), P.back()}) {
        for (double b : {B.front(), B.back()}) {
          if (b > 0.0) checks.push_back(check(p, b));
        }
      }
      if (B[r.best_b] > 0.0) checks.push_back(check(P[r.best_phi], B[r.best_b]));
      r.verification = checks;
    }
    log << "sweep: |t_a| = " << shortest(ta) << ": grid minimum " << shortest(*it) << " at phi = "
        << shortest(phi * 180.0 / kPi) << " deg, b = " << shortest(r.grid.b_values[r.best_b]);
    if (r.refined) log << "; refined b = " << shortest(r.refined->b) << " (" << shortest(r.refined->darkness) << ")";
    log << '\n';
    results.push_back(std::move(r));
  }

  Json summary = Json::array();
  Artifacts out(opt.out_dir);
  for (const auto& r : results) {
    const std::string name = "darkness_ta" + shortest(r.t_a) + ".csv";
    out.add(name, [&r, &cfg](const fs::path& p) { write_sweep_csv(p, r.grid, r.t_a, cfg.t_b, cfg.sys, cfg.a); });
    Json s;
    s["t_a_abs"] = r.t_a;
    s["file"] = name;
    s["grid_minimum"] = {{"phi_rad", r.grid.phi_values[r.best_phi]},
                         {"phi_deg", r.grid.phi_values[r.best_phi] * 180.0 / kPi},
                         {"b_x1", r.grid.b_values[r.best_b]},
                         {"darkness", r.grid.at(r.best_phi, r.best_b)}};
    if (r.refined) {
      s["optimum"] = {{"phi_rad", r.grid.phi_values[r.best_phi]},
                      {"b_x1", r.refined->b},
                      {"darkness", r.refined->darkness},
                      {"at_boundary", r.refined->at_boundary}};
    }
    if (!r.verification.is_null()) s["verification"] = r.verification;
    summary.push_back(s);
  }
  out.add_text("sweep_summary.json", summary.dump(2) + "\n");
  Json m = manifest("sweep", doc, opt);
  m["resolved"] = {{"system", system_json(cfg.sys)}, {"a_m", cfg.a}, {"t_b", cfg.t_b}};
  auto names = out.names();
  for (const auto& r : results) names.push_back("darkness_ta" + shortest(r.t_a) + ".csv.json");
  names.push_back("manifest.json");
  m["outputs"] = names;
  out.add_text("manifest.json", m.dump(2) + "\n");
  out.commit();
}

void cmd_constants(std::ostream& out, int digits) {
  if (digits < 1 || digits > 17) throw InvalidArgument("constants: digits must be in [1, 17]");
  const SystemSpec unit{1.0, 1.0, 1e-6};
  const double x1 = bessel_zero(1, 1);
  const auto bright = expansion_coeffs(TrapKind::Bright, 3);
  const auto dark = expansion_coeffs(TrapKind::Dark287, 3);
  const auto opaque = expansion_coeffs(TrapKind::DarkOpaque, 3);
  const double ta = dark_condition_ta(x1, SystemSpec{1.0, 1.0, 2.0 * kPi}, 1.0);

  // Reference case: 808 nm, w0 = 1 um, kB T / U0 = 1/10.
  const double lambda = 808e-9, w0 = 1e-6, T = 1e-4, U0 = 10.0 * kBoltzmann * T, mass = 1.443e-25;
  const double zR = kPi * w0 * w0 / lambda;
  const auto gauss = confinement(ConfinementKind::Gaussian, U0, T, {w0, zR, 1.0, 0.0}, mass);
  const double h_bright = 1.0 / std::sqrt(-bright.axial_zR[1]);
  const double h_dark = 1.0 / std::sqrt(dark.axial_zR[1]);
  const auto ag = confinement(ConfinementKind::Bright, U0, T, {w0, zR, h_bright, 0.0}, mass);
  const auto dk = confinement(ConfinementKind::Dark287, U0, T, {w0, zR, h_dark, dark.radial_w0[2]}, mass);
  const auto zone = filter_gain(zone_bands(1));

  const MaskParams bright3{1.0, 3.0, 1.0, 0.0, 0.0};
  const MaskParams opaque3{1.0, 3.0, 0.0, 1.0, 0.0};
  const std::vector<std::tuple<const char*, double, const char*>> rows{
      {"x1_first_zero_J1", x1, ""},
      {"x0_first_zero_J0", bessel_zero(0, 1), ""},
      {"bright_efficiency", efficiency(TrapKind::Bright, unit), "I/I0"},
      {"bright_radial_c1", bright.radial_a[1], "(rho/a)^2 peak-normalized"},
      {"bright_radial_c2", bright.radial_a[2], "(rho/a)^4 peak-normalized"},
      {"bright_w0_over_a", bright.w0_over_a, "f2/f1 units"},
      {"bright_axial_c1", bright.axial_zR[1], "(z/zR)^2"},
      {"bright_axial_c2", bright.axial_zR[2], "(z/zR)^4"},
      {"bright_h", h_bright, ""},
      {"dark_ta", ta, "t_a/t_b"},
      {"dark_Ta", ta * ta, "|t_a/t_b|^2"},
      {"dark_w0_over_a", dark.w0_over_a, "f2/f1 units"},
      {"dark_radial_quartic", dark.radial_w0[2], "(rho/w0)^4"},
      {"dark_axial_c1", dark.axial_zR[1], "(z/zR)^2"},
      {"dark_axial_c2", dark.axial_zR[2], "(z/zR)^4"},
      {"dark_h", h_dark, ""},
      {"dark_efficiency", efficiency(TrapKind::Dark287, unit), "I/I0"},
      {"opaque_w0_over_a", opaque.w0_over_a, "f2/f1 units"},
      {"opaque_radial_c2", opaque.radial_w0[2], "(rho/w0)^4"},
      {"opaque_radial_c3", opaque.radial_w0[3], "(rho/w0)^6"},
      {"opaque_axial_c1", opaque.axial_zR[1], "(z/zR)^2"},
      {"opaque_axial_c2", opaque.axial_zR[2], "(z/zR)^4"},
      {"opaque_efficiency", efficiency(TrapKind::DarkOpaque, unit), "I/I0"},
      {"eta_iris_x1", filter_transmission(Passband::IrisX1), ""},
      {"eta_iris_x0", filter_transmission(Passband::IrisX0), ""},
      {"throughput_bright_d3a", power_throughput(bright3, Passband::IrisX1), "P_out/P_in"},
      {"throughput_opaque_d3a", power_throughput(opaque3, Passband::IrisX0), "P_out/P_in"},
      {"gaussian_sigma_rho", gauss.sigma_rho * 1e6, "um"},
      {"gaussian_sigma_z", gauss.sigma_z * 1e6, "um"},
      {"bright_sigma_z", ag.sigma_z * 1e6, "um"},
      {"dark_sigma_rho", dk.sigma_rho * 1e6, "um"},
      {"dark_sigma_z", dk.sigma_z * 1e6, "um"},
      {"talbot_length_43um_805nm", talbot_length(43e-6, 805e-9) * 1e3, "mm"},
      {"dual_tb_equal_alpha", dual_species_balance(1.0, -1.0, DarkVariant::TaScaled), ""},
      {"dual_tb_rb_cs_scaled", dual_species_balance(847.0, -433.0, DarkVariant::TaScaled), ""},
      {"dual_tb_rb_cs_opaque", dual_species_balance(847.0, -433.0, DarkVariant::Opaque), ""},
      {"zone_efficiency_ratio", zone.efficiency, ""},
      {"zone_radial_ratio", zone.radial, ""},
      {"zone_axial_ratio", zone.axial, ""},
  };
  out << "name,value,units\n";
  char buf[64];
  for (const auto& [name, value, units] : rows) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    out << name << ',' << buf << ',' << units << '\n';
  }
}

}  // namespace trapgen::cli
