#include "trapgen/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "trapgen/error.hpp"

namespace trapgen {

namespace {

// FFTW planning is not thread safe; execution through the new-array
// interface is. Plans are made once per shape and kept for the process.
class PlanCache {
 public:
  fftw_plan get(std::size_t nx, std::size_t ny, FftDirection dir) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(nx, ny, dir == FftDirection::Forward);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cplx> scratch(nx * ny);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), buf, buf,
                                   dir == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) throw NumericalFailure("fft2d: FFTW could not create a plan");
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void shift(Field& f, bool inverse) {
  const std::size_t nx = f.nx(), ny = f.ny();
  const std::size_t sx = inverse ? nx - nx / 2 : nx / 2;
  const std::size_t sy = inverse ? ny - ny / 2 : ny / 2;
  std::vector<cplx> out(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t jj = (j + sy) % ny;
    for (std::size_t i = 0; i < nx; ++i) out[jj * nx + (i + sx) % nx] = f(i, j);
  }
  std::copy(out.begin(), out.end(), f.data());
}

}  // namespace

void fft2d(cplx* data, std::size_t nx, std::size_t ny, FftDirection dir) {
  fftw_plan p = cache().get(nx, ny, dir);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, buf, buf);
}

void ifftshift(Field& f) { shift(f, true); }
void fftshift(Field& f) { shift(f, false); }

}  // namespace trapgen
