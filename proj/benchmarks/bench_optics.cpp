#include <benchmark/benchmark.h>

#include "trapgen/incoherent.hpp"
#include "trapgen/optics.hpp"

using namespace trapgen;

namespace {

const SystemSpec kSys{0.5, 0.5, 808e-9};

Field bright_mask(std::size_t n) {
  const double a = 100e-6;
  const Geometry g = make_geometry(n, n, a / 16.0, a / 16.0);
  MaskSpec m;
  m.params = MaskParams{a, 2 * a, 1.0, 0.0, 0.0};
  return render_mask(m, g);
}

}  // namespace

static void BM_LensFourier(benchmark::State& state) {
  const Field in = bright_mask(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lens_fourier(in, kSys.f1, kSys.lambda));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_LensFourier)->RangeMultiplier(2)->Range(256, 2048)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_Propagate4f(benchmark::State& state) {
  const Field mask = bright_mask(static_cast<std::size_t>(state.range(0)));
  const Field in(mask.geometry(), cplx{1.0, 0.0});
  const FilterSpec filter = iris_filter(1.0, 100e-6, kSys);
  for (auto _ : state) benchmark::DoNotOptimize(propagate_4f(in, mask, filter, kSys));
}
BENCHMARK(BM_Propagate4f)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_AngularStep(benchmark::State& state) {
  const Field f = bright_mask(1024);
  for (auto _ : state) benchmark::DoNotOptimize(propagate_angular(f, 1e-3, kSys.lambda));
}
BENCHMARK(BM_AngularStep)->Unit(benchmark::kMillisecond);

static void BM_Speckle(benchmark::State& state) {
  SourceSpec s;
  s.lambda0 = 825e-9;
  s.fwhm = 3e-9;
  s.n_spectral = 21;
  s.n_modes = static_cast<std::size_t>(state.range(0));
  s.mode_waist = 100e-6;
  s.seed = 1;
  const Geometry g = make_geometry(512, 512, 4e-6, 4e-6);
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_speckle(s, k++ % 21, 0, g));
}
BENCHMARK(BM_Speckle)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
