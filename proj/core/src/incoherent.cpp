#include "trapgen/incoherent.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"
#include "trapgen/error.hpp"
#include "trapgen/parallel.hpp"

namespace trapgen {

namespace {

// Normalized Hermite functions u_m(x) with int u_m^2 dx = 1 and
// |u_0|^2 = sqrt(2/pi)/w exp(-2 x^2 / w^2), via the stable three-term recurrence.
std::vector<std::vector<double>> hermite_basis(int nmax, std::size_t n, double pitch, double waist) {
  std::vector<std::vector<double>> u(static_cast<std::size_t>(nmax) + 1, std::vector<double>(n));
  const double norm0 = std::pow(2.0 / kPi, 0.25) / std::sqrt(waist);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) - static_cast<double>(n / 2)) * pitch;
    const double s = std::sqrt(2.0) * x / waist;
    u[0][i] = norm0 * std::exp(-0.5 * s * s);
    if (nmax >= 1) u[1][i] = std::sqrt(2.0) * s * u[0][i];
    for (int m = 2; m <= nmax; ++m) {
      const auto md = static_cast<double>(m);
      u[static_cast<std::size_t>(m)][i] = std::sqrt(2.0 / md) * s * u[static_cast<std::size_t>(m) - 1][i] -
                                          std::sqrt((md - 1.0) / md) * u[static_cast<std::size_t>(m) - 2][i];
    }
  }
  return u;
}

void check_mode_fits(int order, double waist, const Geometry& geom) {
  const double reach = waist * std::sqrt(static_cast<double>(order) + 1.0);
  if (reach > geom.inner_radius()) {
    throw GeometryError("hg_mode: order " + std::to_string(order) + " mode of waist " + std::to_string(waist) +
                        " m reaches " + std::to_string(reach) + " m, beyond the grid half-extent " +
                        std::to_string(geom.inner_radius()) + " m");
  }
}

double unit_uniform(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace

void SourceSpec::validate() const {
  if (!(lambda0 > 0.0)) throw InvalidArgument("source: lambda0 must be positive");
  if (!(fwhm >= 0.0)) throw InvalidArgument("source: fwhm must be >= 0");
  if (fwhm >= lambda0) throw InvalidArgument("source: fwhm must be smaller than lambda0");
  if (n_spectral < 1 || n_modes < 1) throw InvalidArgument("source: n_spectral and n_modes must be >= 1");
  if (!(mode_waist > 0.0)) throw InvalidArgument("source: mode_waist must be positive");
  if (draws < 1) throw InvalidArgument("source: draws must be >= 1");
}

std::vector<std::pair<int, int>> hg_mode_list(std::size_t n_modes) {
  std::vector<std::pair<int, int>> out;
  out.reserve(n_modes);
  for (int order = 0; out.size() < n_modes; ++order) {
    for (int m = 0; m <= order && out.size() < n_modes; ++m) out.emplace_back(m, order - m);
  }
  return out;
}

Field hg_mode(int m, int n, double waist, const Geometry& geom) {
  if (m < 0 || n < 0) throw InvalidArgument("hg_mode: mode indices must be >= 0");
  if (!(waist > 0.0)) throw InvalidArgument("hg_mode: waist must be positive");
  check_mode_fits(std::max(m, n), waist, geom);
  const auto ux = hermite_basis(m, geom.nx, geom.dx, waist);
  const auto uy = hermite_basis(n, geom.ny, geom.dy, waist);
  Field f(geom, cplx{});
  for (std::size_t j = 0; j < geom.ny; ++j) {
    for (std::size_t i = 0; i < geom.nx; ++i) {
      f(i, j) = ux[static_cast<std::size_t>(m)][i] * uy[static_cast<std::size_t>(n)][j];
    }
  }
  return f;
}

Field sample_speckle(const SourceSpec& spec, std::size_t spectral_index, std::size_t draw_index,
                     const Geometry& geom) {
  spec.validate();
  if (spectral_index >= spec.n_spectral || draw_index >= spec.draws) {
    throw InvalidArgument("sample_speckle: index outside the source specification");
  }
  const auto modes = hg_mode_list(spec.n_modes);
  int nmax = 0;
  for (const auto& [m, n] : modes) nmax = std::max({nmax, m, n});
  check_mode_fits(nmax, spec.mode_waist, geom);

  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(spectral_index), static_cast<std::uint32_t>(draw_index)};
  std::mt19937_64 eng(seq);
  const auto dim = static_cast<std::size_t>(nmax) + 1;
  std::vector<cplx> coeff(dim * dim, cplx{});
  for (const auto& [m, n] : modes) {
    coeff[static_cast<std::size_t>(m) * dim + static_cast<std::size_t>(n)] =
        std::polar(1.0, 2.0 * kPi * unit_uniform(eng));
  }

  const auto ux = hermite_basis(nmax, geom.nx, geom.dx, spec.mode_waist);
  const auto uy = hermite_basis(nmax, geom.ny, geom.dy, spec.mode_waist);
  // Separable synthesis: T[n][i] = sum_m c[m][n] u_m(x_i), S(i,j) = sum_n T[n][i] u_n(y_j).
  std::vector<std::vector<cplx>> T(dim, std::vector<cplx>(geom.nx, cplx{}));
  for (std::size_t n = 0; n < dim; ++n) {
    for (std::size_t m = 0; m < dim; ++m) {
      const cplx c = coeff[m * dim + n];
      if (c == cplx{}) continue;
      for (std::size_t i = 0; i < geom.nx; ++i) T[n][i] += c * ux[m][i];
    }
  }
  const double norm = 1.0 / std::sqrt(static_cast<double>(spec.n_modes));
  Field f(geom, cplx{});
  for (std::size_t j = 0; j < geom.ny; ++j) {
    cplx* row = f.data() + j * geom.nx;
    for (std::size_t n = 0; n < dim; ++n) {
      const double w = uy[n][j] * norm;
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < geom.nx; ++i) row[i] += w * T[n][i];
    }
  }
  return f;
}

std::vector<double> component_wavelengths(const SourceSpec& spec) {
  std::vector<double> out(spec.n_spectral, spec.lambda0);
  if (spec.n_spectral > 1) {
    for (std::size_t i = 0; i < spec.n_spectral; ++i) {
      const double u = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(spec.n_spectral - 1);
      out[i] = spec.lambda0 + spec.fwhm * u;
    }
  }
  return out;
}

double lorentzian_profile(double lambda, const SourceSpec& spec) {
  if (spec.fwhm == 0.0) return lambda == spec.lambda0 ? 1.0 : 0.0;
  const double gamma = kSpeedOfLight * 0.5 * spec.fwhm / (spec.lambda0 * spec.lambda0);
  const double dnu = kSpeedOfLight / lambda - kSpeedOfLight / spec.lambda0;
  return 1.0 / (1.0 + (dnu / gamma) * (dnu / gamma));
}

double lorentzian_weight(double lambda, const SourceSpec& spec) {
  double total = 0.0;
  for (double l : component_wavelengths(spec)) total += lorentzian_profile(l, spec);
  return lorentzian_profile(lambda, spec) / total;
}

namespace {

void accumulate(Volume& acc, const Volume& part, double weight) {
  for (std::size_t p = 0; p < acc.planes.size(); ++p) {
    auto dst = acc.planes[p].samples();
    auto src = part.planes[p].samples();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += weight * src[k];
  }
  for (const auto& w : part.warnings) {
    if (std::find(acc.warnings.begin(), acc.warnings.end(), w) == acc.warnings.end()) acc.warnings.push_back(w);
  }
}

}  // namespace

Volume incoherent_volume(const SourceSpec& spec, const Field& mask_field, const FilterSpec& filter,
                         const SystemSpec& sys, const std::vector<double>& z_values, std::size_t threads) {
  spec.validate();
  sys.validate();
  const auto lambdas = component_wavelengths(spec);
  std::vector<double> weights(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) weights[i] = lorentzian_weight(lambdas[i], spec);

  const auto& geom = mask_field.geometry();
  auto component = [&](std::size_t s) {
    const SystemSpec local{sys.f1, sys.f2, lambdas[s]};
    Volume sum;
    for (std::size_t d = 0; d < spec.draws; ++d) {
      const Field out = propagate_4f(sample_speckle(spec, s, d, geom), mask_field, filter, local);
      Volume v = axial_scan(out, z_values, local.lambda, 1);
      if (d == 0) {
        sum = std::move(v);
      } else {
        accumulate(sum, v, 1.0);
      }
    }
    if (spec.draws > 1) {
      const double inv = 1.0 / static_cast<double>(spec.draws);
      for (auto& plane : sum.planes) {
        for (auto& x : plane.samples()) x *= inv;
      }
    }
    return sum;
  };

  Volume acc;
  const std::size_t batch = std::min(resolve_threads(threads), lambdas.size());
  for (std::size_t start = 0; start < lambdas.size(); start += batch) {
    const std::size_t count = std::min(batch, lambdas.size() - start);
    std::vector<Volume> parts(count);
    parallel_for(count, count, [&](std::size_t k) { parts[k] = component(start + k); });
    for (std::size_t k = 0; k < count; ++k) {
      if (acc.planes.empty()) {
        acc.z_values = parts[k].z_values;
        acc.warnings = parts[k].warnings;
        acc.planes.assign(parts[k].planes.size(), RealGrid());
        for (std::size_t p = 0; p < acc.planes.size(); ++p) {
          acc.planes[p] = RealGrid(parts[k].planes[p].geometry(), 0.0);
        }
      }
      accumulate(acc, parts[k], weights[start + k]);
    }
  }
  return acc;
}

Volume coherent_volume(const Field& mask_field, const FilterSpec& filter, const SystemSpec& sys,
                       const std::vector<double>& z_values, std::size_t threads) {
  const Field input(mask_field.geometry(), cplx{1.0, 0.0});
  return axial_scan(propagate_4f(input, mask_field, filter, sys), z_values, sys.lambda, threads);
}

std::string ensemble_manifest(const SourceSpec& spec) {
  spec.validate();
  nlohmann::ordered_json j;
  j["seed"] = spec.seed;
  j["lambda0_m"] = spec.lambda0;
  j["fwhm_m"] = spec.fwhm;
  j["n_spectral"] = spec.n_spectral;
  j["n_modes"] = spec.n_modes;
  j["mode_waist_m"] = spec.mode_waist;
  j["draws_per_component"] = spec.draws;
  j["rng"] = "mt19937_64 seeded by seed_seq{seed_lo32, seed_hi32, spectral_index, draw_index}";
  const auto lambdas = component_wavelengths(spec);
  j["wavelengths_m"] = lambdas;
  std::vector<double> w;
  for (double l : lambdas) w.push_back(lorentzian_weight(l, spec));
  j["weights"] = w;
  auto modes = nlohmann::ordered_json::array();
  for (const auto& [m, n] : hg_mode_list(spec.n_modes)) modes.push_back({m, n});
  j["modes"] = modes;
  return j.dump(2);
}

}  // namespace trapgen
