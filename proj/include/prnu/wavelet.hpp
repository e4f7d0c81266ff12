#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace prnu {

// Orthonormal Daubechies 8-tap filter pair (4 vanishing moments).
// Highpass is the quadrature mirror: g[t] = (-1)^t * h[7-t].
extern const std::array<double, 8> kDaub8Lowpass;
extern const std::array<double, 8> kDaub8Highpass;

// Separable 2-D discrete wavelet transform with half-point symmetric
// boundary extension. The transform is expansive: each analysis level
// keeps floor((n + taps - 2) / 2) + 1 coefficients per axis, which makes
// forward-then-inverse reconstruction exact (to rounding) for arbitrary
// sizes and any FIR pair.
struct Subband {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    std::size_t count() const { return values.size(); }
};

struct WaveletLevel {
    Subband lh;  // horizontal detail (lowpass rows, highpass cols)
    Subband hl;  // vertical detail
    Subband hh;  // diagonal detail
    int input_rows = 0;  // dimensions this level was analyzed from
    int input_cols = 0;
};

struct WaveletPyramid {
    std::vector<WaveletLevel> levels;  // levels[0] is the finest
    Subband approx;                    // coarsest LL band
};

// Coefficient length after one analysis step of an n-sample signal.
std::size_t dwt_output_length(std::size_t n, std::size_t taps);

// Forward transform to `levels` levels. Requires levels >= 1 and both
// dimensions >= 2^levels.
WaveletPyramid dwt2(const double* data, int rows, int cols, int levels);

// Inverse transform; returns a rows x cols row-major array matching the
// dimensions dwt2 was called with.
std::vector<double> idwt2(const WaveletPyramid& pyr);

}  // namespace prnu
