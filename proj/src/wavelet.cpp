#include "prnu/wavelet.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "prnu/error.hpp"
#include "prnu/kernels.hpp"

namespace prnu {

// Daubechies 4-vanishing-moment scaling filter, 8 taps, sum sqrt(2).
const std::array<double, 8> kDaub8Lowpass = {
    0.23037781330885523,  0.7148465705525415,   0.6308807679295904,
    -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
    0.032883011666982945, -0.010597401784997278,
};

namespace {

constexpr int kTaps = 8;
constexpr int kExt = kTaps - 1;  // extension amount per side

std::array<double, 8> make_highpass() {
    std::array<double, 8> g{};
    for (int t = 0; t < kTaps; ++t) {
        const double h = kDaub8Lowpass[kTaps - 1 - t];
        g[t] = (t % 2 == 0) ? h : -h;
    }
    return g;
}

// Half-point symmetric reflection of index k into [0, n).
inline int reflect(int k, int n) {
    while (k < 0 || k >= n) {
        if (k < 0) k = -1 - k;
        if (k >= n) k = 2 * n - 1 - k;
    }
    return k;
}

struct FilteredPair {
    std::vector<double> low;
    std::vector<double> high;
};

// One analysis step along the rows of an nrows x ncols matrix. Each row
// is symmetric-extended, split into even/odd phases, and correlated with
// both filters at stride 2 via shifted axpy passes.
void analyze_rows(const double* src, int nrows, int ncols, double* low,
                  double* high, int out_cols) {
    const auto& k = kernels::active();
    static const std::array<double, 8> g = make_highpass();

    const int ext_len = ncols + 2 * kExt;
    const std::size_t npairs = static_cast<std::size_t>(ext_len) / 2;
    std::vector<double> ext(ext_len);
    std::vector<double> even(npairs + 4, 0.0), odd(npairs + 4, 0.0);

    for (int r = 0; r < nrows; ++r) {
        const double* row = src + static_cast<std::size_t>(r) * ncols;
        for (int i = 0; i < ext_len; ++i) ext[i] = row[reflect(i - kExt, ncols)];
        k.deinterleave2(even.data(), odd.data(), ext.data(), npairs);
        if (ext_len % 2 != 0) even[npairs] = ext[ext_len - 1];

        double* lo = low + static_cast<std::size_t>(r) * out_cols;
        double* hi = high + static_cast<std::size_t>(r) * out_cols;
        std::fill(lo, lo + out_cols, 0.0);
        std::fill(hi, hi + out_cols, 0.0);
        for (int u = 0; u < kTaps / 2; ++u) {
            k.axpy(lo, even.data() + u, kDaub8Lowpass[2 * u], out_cols);
            k.axpy(lo, odd.data() + u, kDaub8Lowpass[2 * u + 1], out_cols);
            k.axpy(hi, even.data() + u, g[2 * u], out_cols);
            k.axpy(hi, odd.data() + u, g[2 * u + 1], out_cols);
        }
    }
}

// One analysis step along the columns; whole rows are the vector lanes,
// boundary handling happens through reflected row indices.
void analyze_cols(const double* src, int nrows, int ncols, double* low,
                  double* high, int out_rows) {
    const auto& k = kernels::active();
    static const std::array<double, 8> g = make_highpass();

    for (int i = 0; i < out_rows; ++i) {
        double* lo = low + static_cast<std::size_t>(i) * ncols;
        double* hi = high + static_cast<std::size_t>(i) * ncols;
        std::fill(lo, lo + ncols, 0.0);
        std::fill(hi, hi + ncols, 0.0);
        for (int t = 0; t < kTaps; ++t) {
            const double* row =
                src + static_cast<std::size_t>(reflect(2 * i + t - kExt, nrows)) * ncols;
            k.axpy(lo, row, kDaub8Lowpass[t], ncols);
            k.axpy(hi, row, g[t], ncols);
        }
    }
}

// Inverse of analyze_rows: polyphase overlap-add into an extended row,
// then crop the central target_cols samples.
void synthesize_rows(const double* low, const double* high, int nrows,
                     int coeff_cols, double* dst, int target_cols) {
    const auto& k = kernels::active();
    static const std::array<double, 8> g = make_highpass();

    const std::size_t half = static_cast<std::size_t>(coeff_cols) + 4;
    std::vector<double> y_even(half), y_odd(half);

    for (int r = 0; r < nrows; ++r) {
        const double* lo = low + static_cast<std::size_t>(r) * coeff_cols;
        const double* hi = high + static_cast<std::size_t>(r) * coeff_cols;
        std::fill(y_even.begin(), y_even.end(), 0.0);
        std::fill(y_odd.begin(), y_odd.end(), 0.0);
        for (int u = 0; u < kTaps / 2; ++u) {
            k.axpy(y_even.data() + u, lo, kDaub8Lowpass[2 * u], coeff_cols);
            k.axpy(y_even.data() + u, hi, g[2 * u], coeff_cols);
            k.axpy(y_odd.data() + u, lo, kDaub8Lowpass[2 * u + 1], coeff_cols);
            k.axpy(y_odd.data() + u, hi, g[2 * u + 1], coeff_cols);
        }
        double* out = dst + static_cast<std::size_t>(r) * target_cols;
        for (int p = 0; p < target_cols; ++p) {
            const int q = p + kExt;  // position in the extended signal
            out[p] = (q % 2 == 0) ? y_even[q / 2] : y_odd[q / 2];
        }
    }
}

void synthesize_cols(const double* low, const double* high, int coeff_rows,
                     int ncols, double* dst, int target_rows) {
    const auto& k = kernels::active();
    static const std::array<double, 8> g = make_highpass();

    const int y_rows = target_rows + 2 * kExt;
    std::vector<double> y(static_cast<std::size_t>(y_rows) * ncols, 0.0);
    for (int i = 0; i < coeff_rows; ++i) {
        const double* lo = low + static_cast<std::size_t>(i) * ncols;
        const double* hi = high + static_cast<std::size_t>(i) * ncols;
        for (int t = 0; t < kTaps; ++t) {
            const int q = 2 * i + t;
            if (q >= y_rows) break;
            double* row = y.data() + static_cast<std::size_t>(q) * ncols;
            k.axpy(row, lo, kDaub8Lowpass[t], ncols);
            k.axpy(row, hi, g[t], ncols);
        }
    }
    for (int r = 0; r < target_rows; ++r) {
        const double* src_row = y.data() + static_cast<std::size_t>(r + kExt) * ncols;
        std::copy(src_row, src_row + ncols, dst + static_cast<std::size_t>(r) * ncols);
    }
}

}  // namespace

const std::array<double, 8> kDaub8Highpass = make_highpass();

std::size_t dwt_output_length(std::size_t n, std::size_t taps) {
    return (n + taps - 2) / 2 + 1;
}

WaveletPyramid dwt2(const double* data, int rows, int cols, int levels) {
    if (levels < 1) throw Error("wavelet level count must be >= 1");
    const int min_dim = 1 << levels;
    if (rows < min_dim || cols < min_dim)
        throw Error("frame " + std::to_string(cols) + "x" + std::to_string(rows) +
                    " too small for " + std::to_string(levels) +
                    " wavelet levels (needs >= " + std::to_string(min_dim) + ")");

    WaveletPyramid pyr;
    std::vector<double> current(data, data + static_cast<std::size_t>(rows) * cols);
    int r = rows, c = cols;

    for (int lvl = 0; lvl < levels; ++lvl) {
        const int oc = static_cast<int>(dwt_output_length(c, kTaps));
        const int orows = static_cast<int>(dwt_output_length(r, kTaps));

        std::vector<double> low_part(static_cast<std::size_t>(r) * oc);
        std::vector<double> high_part(static_cast<std::size_t>(r) * oc);
        analyze_rows(current.data(), r, c, low_part.data(), high_part.data(), oc);

        WaveletLevel level;
        level.input_rows = r;
        level.input_cols = c;
        level.lh = {orows, oc, std::vector<double>(static_cast<std::size_t>(orows) * oc)};
        level.hl = {orows, oc, std::vector<double>(static_cast<std::size_t>(orows) * oc)};
        level.hh = {orows, oc, std::vector<double>(static_cast<std::size_t>(orows) * oc)};

        std::vector<double> ll(static_cast<std::size_t>(orows) * oc);
        analyze_cols(low_part.data(), r, oc, ll.data(), level.lh.values.data(), orows);
        analyze_cols(high_part.data(), r, oc, level.hl.values.data(),
                     level.hh.values.data(), orows);

        pyr.levels.push_back(std::move(level));
        current = std::move(ll);
        r = orows;
        c = oc;
    }

    pyr.approx = {r, c, std::move(current)};
    return pyr;
}

std::vector<double> idwt2(const WaveletPyramid& pyr) {
    if (pyr.levels.empty()) throw Error("empty wavelet pyramid");

    std::vector<double> current = pyr.approx.values;

    for (auto it = pyr.levels.rbegin(); it != pyr.levels.rend(); ++it) {
        const WaveletLevel& level = *it;
        const int cr = level.lh.rows, cc = level.lh.cols;
        const int tr = level.input_rows, tc = level.input_cols;

        std::vector<double> low_part(static_cast<std::size_t>(tr) * cc);
        std::vector<double> high_part(static_cast<std::size_t>(tr) * cc);
        synthesize_cols(current.data(), level.lh.values.data(), cr, cc,
                        low_part.data(), tr);
        synthesize_cols(level.hl.values.data(), level.hh.values.data(), cr, cc,
                        high_part.data(), tr);

        std::vector<double> out(static_cast<std::size_t>(tr) * tc);
        synthesize_rows(low_part.data(), high_part.data(), tr, cc, out.data(), tc);
        current = std::move(out);
    }

    return current;
}

}  // namespace prnu
