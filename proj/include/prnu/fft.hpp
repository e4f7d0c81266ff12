#pragma once

#include <complex>
#include <vector>

namespace prnu::fft {

// Thin double-precision wrappers over FFTW's 2-D real transforms. The
// half-spectrum layout is rows x (cols/2 + 1), row-major. FFTW planning
// is not thread-safe, so plan creation is serialized internally; execution
// runs unlocked.

// Forward real-to-complex. `data` is rows x cols row-major.
std::vector<std::complex<double>> forward_r2c(const double* data, int rows, int cols);

// Inverse complex-to-real of a half spectrum. Output is unnormalized
// (scaled by rows*cols), matching FFTW; callers divide. The spectrum is
// consumed (FFTW c2r clobbers its input), hence by-value.
std::vector<double> inverse_c2r(std::vector<std::complex<double>> spectrum,
                                int rows, int cols);

}  // namespace prnu::fft
