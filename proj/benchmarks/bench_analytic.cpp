#include <benchmark/benchmark.h>

#include "trapgen/analytic.hpp"

using namespace trapgen;

// Same integral by both routes over a fixed set of arguments.
static void BM_BesselSeries(benchmark::State& state) {
  double c = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_integral_series(c, 1.3, 3.8317));
    c = c > 2.0 ? 0.1 : c + 0.01;
  }
}
BENCHMARK(BM_BesselSeries);

static void BM_BesselQuadrature(benchmark::State& state) {
  double c = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_integral_quadrature(c, 1.3, 3.8317));
    c = c > 2.0 ? 0.1 : c + 0.01;
  }
}
BENCHMARK(BM_BesselQuadrature);

static void BM_ApertureResponse(benchmark::State& state) {
  const std::vector<Band> bands{{0.0, bessel_zero(1, 1)}};
  double s = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(aperture_response(s, 0.3, bands));
    s = s > 2.0 ? 0.0 : s + 0.01;
  }
}
BENCHMARK(BM_ApertureResponse);
BENCHMARK_MAIN();
