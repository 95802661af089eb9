#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "trapgen/error.hpp"

namespace trapgen::cli {

namespace {

using Json = nlohmann::ordered_json;

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Walks the text key by key, so "/mask/a_m" lands on the a_m inside mask.
std::size_t line_of_path(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const auto& key : path) {
    const auto hit = text.find('"' + key + '"', pos);
    if (hit == std::string::npos) break;
    pos = hit;
  }
  return pos == 0 ? 0 : line_of_offset(text, pos);
}

// Cursor into the document that knows its own path for error messages.
class Node {
 public:
  Node(const Json& j, const std::string& text, std::vector<std::string> path)
      : j_(j), text_(text), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    std::string where;
    for (const auto& p : path_) where += "/" + p;
    throw ConfigError((where.empty() ? "" : where + ": ") + msg, line_of_path(text_, path_));
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  [[nodiscard]] Node child(const std::string& key) const {
    if (!has(key)) Node(j_, text_, path_).fail("missing required key \"" + key + "\"");
    auto p = path_;
    p.push_back(key);
    return Node(j_.at(key), text_, p);
  }

  void require_object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [k, v] : j_.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
        auto p = path_;
        p.push_back(k);
        Node(v, text_, p).fail("unknown key");
      }
    }
  }

  [[nodiscard]] double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  [[nodiscard]] double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be positive");
    return v;
  }

  [[nodiscard]] std::size_t count(std::size_t min_value) const {
    if (!j_.is_number_integer() || j_.get<long long>() < static_cast<long long>(min_value)) {
      fail("expected an integer >= " + std::to_string(min_value));
    }
    return j_.get<std::size_t>();
  }

  [[nodiscard]] std::uint64_t u64() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<long long>() >= 0)) {
      fail("expected a non-negative integer");
    }
    return j_.get<std::uint64_t>();
  }

  [[nodiscard]] bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }

  [[nodiscard]] std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  [[nodiscard]] std::vector<double> numbers() const {
    if (!j_.is_array() || j_.empty()) fail("expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j_.size(); ++i) {
      auto p = path_;
      p.push_back(std::to_string(i));
      out.push_back(Node(j_.at(i), text_, p).number());
    }
    return out;
  }

  // Number, or {"abs": r, "phase_rad": p}.
  [[nodiscard]] cplx complex() const {
    if (j_.is_number()) return number();
    require_object({"abs", "phase_rad"});
    const double r = child("abs").number();
    const double p = has("phase_rad") ? child("phase_rad").number() : 0.0;
    return std::polar(r, p);
  }

  [[nodiscard]] const Json& json() const { return j_; }

 private:
  const Json& j_;
  const std::string& text_;
  std::vector<std::string> path_;
};

Node root(const Document& doc, std::initializer_list<const char*> allowed) {
  Node r(doc.json, doc.text, {});
  r.require_object(allowed);
  const auto v = r.child("schema_version");
  if (!v.json().is_number_integer() || v.json().get<int>() != kSchemaVersion) {
    v.fail("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  }
  return r;
}

// Runs a library validator and re-anchors its message at `at`.
template <class Fn>
void checked(const Node& at, Fn&& fn) {
  try {
    fn();
  } catch (const InvalidArgument& e) {
    at.fail(e.what());
  }
}

SystemSpec parse_system(const Node& n) {
  n.require_object({"f1_m", "f2_m", "lambda_m"});
  SystemSpec s{n.child("f1_m").positive(), n.child("f2_m").positive(), n.child("lambda_m").positive()};
  checked(n, [&] { s.validate(); });
  return s;
}

double iris_units_of(const Node& n, double a, const SystemSpec& sys) {
  if (n.has("b_x1") && n.has("b_m")) n.fail("give either b_x1 or b_m, not both");
  if (n.has("b_m")) return n.child("b_m").positive() / iris_radius(bessel_zero(1, 1), sys, a);
  return n.has("b_x1") ? n.child("b_x1").positive() : 1.0;
}

FilterSpec parse_filter(const Node& n, double a, const SystemSpec& sys, double& units) {
  n.require_object({"kind", "b_x1", "b_m", "rings"});
  const auto kind = n.has("kind") ? n.child("kind").string() : std::string("iris");
  FilterSpec f;
  units = 1.0;
  if (kind == "none") {
    f.kind = FilterKind::None;
    units = INFINITY;
  } else if (kind == "iris") {
    units = iris_units_of(n, a, sys);
    f = iris_filter(units, a, sys);
  } else if (kind == "zone") {
    if (n.has("b_x1") || n.has("b_m")) n.fail("zone filters fix their central radius at x1; drop b_x1/b_m");
    const auto rings = n.has("rings") ? n.child("rings").count(0) : 1;
    f = zone_filter(a, sys, static_cast<int>(rings));
  } else {
    n.child("kind").fail("expected \"iris\", \"zone\" or \"none\"");
  }
  if (kind != "zone" && n.has("rings")) n.child("rings").fail("rings apply only to zone filters");
  checked(n, [&] { f.validate(); });
  return f;
}

MaskSpec parse_mask(const Node& n, const SystemSpec& sys, double iris_units) {
  n.require_object({"kind", "a_m", "d_m", "grid_n", "t_a", "t_b", "phi_ab_rad", "dual", "design"});
  MaskSpec m;
  const auto kind = n.child("kind").string();
  const double a = n.child("a_m").positive();
  const std::size_t grid_n = n.has("grid_n") ? n.child("grid_n").count(1) : 1;
  const double d = n.has("d_m") ? n.child("d_m").positive() : 2.0 * a;
  if (grid_n > 1 && !n.has("d_m")) n.fail("d_m is required when grid_n > 1");

  if (kind == "dual") {
    if (!n.has("design") && !n.has("dual")) n.fail("dual masks need a \"design\" or a \"dual\" block");
    if (n.has("design")) {
      const auto dn = n.child("design");
      dn.require_object({"alpha_bright_A3", "alpha_dark_A3", "variant"});
      const auto v = dn.child("variant").string();
      if (v != "scaled" && v != "opaque") dn.child("variant").fail("expected \"scaled\" or \"opaque\"");
      const double ab = dn.child("alpha_bright_A3").number();
      const double ad = dn.child("alpha_dark_A3").number();
      if (!(ab > 0.0) || !(ad < 0.0)) dn.fail("need alpha_bright_A3 > 0 > alpha_dark_A3");
      // Infeasible balances surface as library errors at run time.
      m = design_dual_mask(ab, ad, a, d, grid_n, v == "opaque" ? DarkVariant::Opaque : DarkVariant::TaScaled);
      return m;
    }
    const auto dn = n.child("dual");
    dn.require_object({"t_a", "phi_ab_rad", "radius_ratio"});
    DualSites s;
    s.t_a = dn.child("t_a").complex();
    s.phi_ab = dn.has("phi_ab_rad") ? dn.child("phi_ab_rad").number() : 0.0;
    s.radius_ratio = dn.has("radius_ratio") ? dn.child("radius_ratio").positive() : 1.0;
    m.kind = MaskKind::Dual;
    m.dual = s;
    m.params = {a, d, 1.0, n.has("t_b") ? n.child("t_b").complex() : cplx{1.0}, 0.0};
  } else if (kind == "bright") {
    m.kind = MaskKind::Bright;
    m.params = {a, d, n.has("t_a") ? n.child("t_a").complex() : cplx{1.0}, 0.0,
                n.has("phi_ab_rad") ? n.child("phi_ab_rad").number() : 0.0};
    if (n.has("t_b")) n.child("t_b").fail("bright masks have an opaque background; drop t_b");
  } else if (kind == "dark") {
    m.kind = MaskKind::Dark;
    const cplx t_b = n.has("t_b") ? n.child("t_b").complex() : cplx{1.0};
    cplx t_a;
    if (n.has("t_a") && n.child("t_a").json().is_string()) {
      if (n.child("t_a").string() != "dark_condition") n.child("t_a").fail("expected a number or \"dark_condition\"");
      if (!std::isfinite(iris_units)) n.child("t_a").fail("dark_condition needs a finite iris");
      t_a = dark_condition_ta(iris_radius(iris_units * bessel_zero(1, 1), sys, a), sys, a) * t_b;
    } else {
      t_a = n.has("t_a") ? n.child("t_a").complex() : cplx{0.0};
    }
    m.params = {a, d, t_a, t_b, n.has("phi_ab_rad") ? n.child("phi_ab_rad").number() : 0.0};
  } else {
    n.child("kind").fail("expected \"bright\", \"dark\" or \"dual\"");
  }
  m.grid_n = grid_n;
  checked(n, [&] { m.validate(); });
  return m;
}

GridConfig parse_grid(const Node& n, double a) {
  n.require_object({"n", "dx_m", "samples_per_a"});
  GridConfig g;
  g.n = n.has("n") ? n.child("n").count(2) : 1024;
  if (n.has("dx_m") && n.has("samples_per_a")) n.fail("give either dx_m or samples_per_a, not both");
  if (n.has("dx_m")) {
    g.dx = n.child("dx_m").positive();
  } else {
    g.dx = a / (n.has("samples_per_a") ? n.child("samples_per_a").positive() : 16.0);
  }
  return g;
}

ScanConfig parse_scan(const Node& n) {
  n.require_object({"z_min_m", "z_max_m", "n", "z_values_m"});
  ScanConfig s;
  if (n.has("z_values_m")) {
    s.z_values = n.child("z_values_m").numbers();
  } else {
    Range r{n.child("z_min_m").number(), n.child("z_max_m").number(), n.child("n").count(1)};
    checked(n, [&] { s.z_values = r.values(); });
  }
  for (std::size_t i = 1; i < s.z_values.size(); ++i) {
    if (!(s.z_values[i] > s.z_values[i - 1])) n.fail("z values must be strictly increasing");
  }
  return s;
}

MetricsConfig parse_metrics(const Node& n) {
  n.require_object({"probe_fraction", "input_intensity_W_m2", "alpha0_uK_per_W_m2", "mass_kg"});
  MetricsConfig m;
  if (n.has("probe_fraction")) {
    m.probe_fraction = n.child("probe_fraction").positive();
    if (m.probe_fraction >= 2.0) n.child("probe_fraction").fail("probe must stay inside 2 a_img");
  }
  if (n.has("input_intensity_W_m2")) m.input_intensity = n.child("input_intensity_W_m2").positive();
  if (n.has("alpha0_uK_per_W_m2")) m.alpha0 = n.child("alpha0_uK_per_W_m2").positive();
  if (n.has("mass_kg")) m.mass = n.child("mass_kg").positive();
  if (m.alpha0 && !m.input_intensity) n.fail("alpha0_uK_per_W_m2 needs input_intensity_W_m2");
  if (m.mass && !m.alpha0) n.fail("mass_kg needs alpha0_uK_per_W_m2 for trap frequencies");
  return m;
}

Range parse_range(const Node& n, double scale) {
  n.require_object({"lo", "hi", "n"});
  Range r{n.child("lo").number() * scale, n.child("hi").number() * scale, n.child("n").count(0)};
  checked(n, [&] { r.validate(); });
  return r;
}

}  // namespace

Document parse_document(std::string text) {
  Document doc;
  doc.text = std::move(text);
  try {
    doc.json = Json::parse(doc.text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line_of_offset(doc.text, e.byte > 0 ? e.byte - 1 : 0));
  }
  return doc;
}

Document load_document(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path, 0);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_document(ss.str());
}

SimulateConfig parse_simulate(const Document& doc) {
  const auto r = root(doc, {"schema_version", "system", "mask", "filter", "grid", "scan", "metrics"});
  SimulateConfig c;
  c.sys = parse_system(r.child("system"));
  const double a = r.child("mask").child("a_m").positive();
  c.filter = r.has("filter") ? parse_filter(r.child("filter"), a, c.sys, c.iris_units) : iris_filter(1.0, a, c.sys);
  c.mask = parse_mask(r.child("mask"), c.sys, c.iris_units);
  c.grid = r.has("grid") ? parse_grid(r.child("grid"), a) : GridConfig{1024, a / 16.0};
  if (r.has("scan")) c.scan = parse_scan(r.child("scan"));
  if (r.has("metrics")) c.metrics = parse_metrics(r.child("metrics"));
  return c;
}

TalbotConfig parse_talbot(const Document& doc) {
  const auto r = root(doc, {"schema_version", "system", "mask", "filter", "grid", "scan", "source", "probe_fraction"});
  TalbotConfig c;
  c.sys = parse_system(r.child("system"));
  const double a = r.child("mask").child("a_m").positive();
  double units = 1.0;
  c.filter = r.has("filter") ? parse_filter(r.child("filter"), a, c.sys, units) : iris_filter(1.0, a, c.sys);
  c.mask = parse_mask(r.child("mask"), c.sys, units);
  c.grid = r.has("grid") ? parse_grid(r.child("grid"), a) : GridConfig{2048, a / 8.0};
  c.scan = parse_scan(r.child("scan"));
  if (r.has("probe_fraction")) c.probe_fraction = r.child("probe_fraction").positive();
  if (r.has("source")) {
    const auto s = r.child("source");
    s.require_object({"coherent", "incoherent"});
    c.coherent = s.has("coherent") ? s.child("coherent").boolean() : true;
    if (s.has("incoherent")) {
      const auto n = s.child("incoherent");
      n.require_object({"lambda0_m", "fwhm_m", "n_spectral", "n_modes", "mode_waist_m", "seed", "draws"});
      SourceSpec src;
      src.lambda0 = n.has("lambda0_m") ? n.child("lambda0_m").positive() : c.sys.lambda;
      src.fwhm = n.has("fwhm_m") ? n.child("fwhm_m").number() : 0.0;
      src.n_spectral = n.has("n_spectral") ? n.child("n_spectral").count(1) : 1;
      src.n_modes = n.has("n_modes") ? n.child("n_modes").count(1) : 1;
      src.mode_waist = n.has("mode_waist_m") ? n.child("mode_waist_m").positive() : 0.5 * c.mask.half_extent();
      src.seed = n.has("seed") ? n.child("seed").u64() : 0;
      src.draws = n.has("draws") ? n.child("draws").count(1) : 1;
      checked(n, [&] { src.validate(); });
      c.source = src;
    }
  }
  if (!c.coherent && !c.source) r.child("source").fail("nothing to run: coherent is false and no incoherent block");
  return c;
}

SweepConfig parse_sweep(const Document& doc) {
  const auto r = root(doc, {"schema_version", "system", "sweep"});
  SweepConfig c;
  c.sys = parse_system(r.child("system"));
  const auto s = r.child("sweep");
  s.require_object({"a_m", "t_a_abs", "t_b", "phi_deg", "b_x1", "search_b_x1"});
  c.a = s.child("a_m").positive();
  const auto ta = s.child("t_a_abs");
  c.t_a_magnitudes = ta.json().is_array() ? ta.numbers() : std::vector<double>{ta.number()};
  for (double v : c.t_a_magnitudes) {
    if (v < 0.0 || v > 1.0) ta.fail("|t_a| values must lie in [0, 1]");
  }
  c.t_b = s.has("t_b") ? s.child("t_b").positive() : 1.0;
  if (c.t_b > 1.0) s.child("t_b").fail("t_b must not exceed 1");
  c.phi = parse_range(s.child("phi_deg"), kPi / 180.0);
  c.b = parse_range(s.child("b_x1"), 1.0);
  if (c.b.lo < 0.0) s.child("b_x1").fail("b must be >= 0");
  if (s.has("search_b_x1")) {
    const auto v = s.child("search_b_x1").numbers();
    if (v.size() != 2 || !(v[0] >= 0.0) || !(v[1] > v[0])) s.child("search_b_x1").fail("expected [lo, hi] with 0 <= lo < hi");
    c.search = std::make_pair(v[0], v[1]);
  }
  return c;
}

}  // namespace trapgen::cli
