#pragma once

#include <vector>

#include "prnu/frame.hpp"

namespace prnu {

// Wavelet-domain locally adaptive Wiener denoiser. Detail coefficients are
// shrunk by var/(var + sigma0^2), where var is the most conservative
// (smallest) local variance estimate over the configured window sizes.
struct DenoiserConfig {
    int wavelet_levels = 4;
    double noise_variance = 9.0;  // sigma0^2, in luminance units squared
    std::vector<int> wiener_window_sizes = {3, 5, 7, 9};

    // Throws Error on invalid values (levels < 1, even/small windows,
    // non-positive variance).
    void validate() const;
};

// Returns the noise-free estimate of `frame`; dimensions are preserved.
// Throws Error when the frame is too small for the requested depth.
LuminanceFrame denoise_frame(const LuminanceFrame& frame, const DenoiserConfig& cfg);

}  // namespace prnu
