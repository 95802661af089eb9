#pragma once

#include <cstddef>

#include "trapgen/grid.hpp"

namespace trapgen {

enum class FftDirection { Forward, Backward };

/// Unnormalized in-place 2D DFT of an ny x nx row-major buffer (FFTW backed).
/// Forward uses exp(-i...), Backward exp(+i...). Safe to call concurrently.
void fft2d(cplx* data, std::size_t nx, std::size_t ny, FftDirection dir);

/// Circular shifts moving sample (nx/2, ny/2) to (0, 0) and back.
void ifftshift(Field& f);
void fftshift(Field& f);

}  // namespace trapgen
