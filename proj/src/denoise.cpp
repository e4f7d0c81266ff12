#include "prnu/denoise.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "prnu/error.hpp"
#include "prnu/kernels.hpp"
#include "prnu/wavelet.hpp"

namespace prnu {

namespace {

// Mean of `src` over a w x w window centered at each sample, zero-padded
// at the borders and always divided by w*w. Separable sliding sums.
std::vector<double> box_mean(const std::vector<double>& src, int rows, int cols,
                             int w) {
    const auto& k = kernels::active();
    const int half = w / 2;
    const double inv = 1.0 / (static_cast<double>(w) * w);
    std::vector<double> rowsum(src.size());
    std::vector<double> out(src.size());

    for (int r = 0; r < rows; ++r) {
        const double* in = src.data() + static_cast<std::size_t>(r) * cols;
        double* rs = rowsum.data() + static_cast<std::size_t>(r) * cols;
        double acc = 0.0;
        for (int c = 0; c <= std::min(half, cols - 1); ++c) acc += in[c];
        for (int c = 0; c < cols; ++c) {
            rs[c] = acc;
            const int enter = c + half + 1;
            if (enter < cols) acc += in[enter];
            const int leave = c - half;
            if (leave >= 0) acc -= in[leave];
        }
    }

    std::vector<double> acc_row(cols, 0.0);
    for (int r = 0; r <= std::min(half, rows - 1); ++r)
        k.axpy(acc_row.data(), rowsum.data() + static_cast<std::size_t>(r) * cols,
               1.0, cols);
    for (int r = 0; r < rows; ++r) {
        double* dst = out.data() + static_cast<std::size_t>(r) * cols;
        std::copy(acc_row.begin(), acc_row.end(), dst);
        k.scale(dst, inv, cols);
        const int enter = r + half + 1;
        if (enter < rows)
            k.axpy(acc_row.data(),
                   rowsum.data() + static_cast<std::size_t>(enter) * cols, 1.0, cols);
        const int leave = r - half;
        if (leave >= 0)
            k.axpy(acc_row.data(),
                   rowsum.data() + static_cast<std::size_t>(leave) * cols, -1.0, cols);
    }
    return out;
}

void shrink_band(Subband& band, const DenoiserConfig& cfg) {
    const auto& k = kernels::active();
    const std::size_t n = band.count();
    if (n == 0) return;

    std::vector<double> sq(n);
    k.square(sq.data(), band.values.data(), n);

    std::vector<double> var(n);
    bool first = true;
    for (int w : cfg.wiener_window_sizes) {
        const std::vector<double> mean = box_mean(sq, band.rows, band.cols, w);
        if (first) {
            k.var_floor(var.data(), mean.data(), cfg.noise_variance, n);
            first = false;
        } else {
            k.var_floor_min(var.data(), mean.data(), cfg.noise_variance, n);
        }
    }
    k.wiener_gain(band.values.data(), var.data(), cfg.noise_variance, n);
}

}  // namespace

void DenoiserConfig::validate() const {
    if (wavelet_levels < 1) throw Error("wavelet_levels must be >= 1");
    if (!(noise_variance > 0.0)) throw Error("noise_variance must be positive");
    if (wiener_window_sizes.empty()) throw Error("wiener_window_sizes is empty");
    for (int w : wiener_window_sizes)
        if (w < 3 || w % 2 == 0)
            throw Error("wiener window sizes must be odd and >= 3, got " +
                        std::to_string(w));
}

LuminanceFrame denoise_frame(const LuminanceFrame& frame, const DenoiserConfig& cfg) {
    cfg.validate();
    frame.validate();

    WaveletPyramid pyr =
        dwt2(frame.samples.data(), frame.height, frame.width, cfg.wavelet_levels);
    for (WaveletLevel& level : pyr.levels) {
        shrink_band(level.lh, cfg);
        shrink_band(level.hl, cfg);
        shrink_band(level.hh, cfg);
    }

    LuminanceFrame out = frame;
    out.samples = idwt2(pyr);
    return out;
}

}  // namespace prnu
