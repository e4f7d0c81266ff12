#include "prnu/matcher.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>

#include "prnu/error.hpp"
#include "prnu/fft.hpp"
#include "prnu/kernels.hpp"

namespace prnu {

const char* to_string(SearchMode m) {
    return m == SearchMode::PeakSearch ? "peak_search" : "zero_shift_only";
}

SearchMode search_mode_from_string(const std::string& s) {
    if (s == "peak_search") return SearchMode::PeakSearch;
    if (s == "zero_shift_only") return SearchMode::ZeroShiftOnly;
    throw Error("unknown search mode: " + s);
}

void MatcherConfig::validate() const {
    if (!(pce_threshold > 0.0)) throw Error("pce_threshold must be positive");
    if (peak_exclusion_radius < 0) throw Error("peak_exclusion_radius must be >= 0");
}

CorrelationSurface cross_correlate(const Fingerprint& a, const Fingerprint& b) {
    a.validate();
    b.validate();
    if (a.width != b.width || a.height != b.height)
        throw DimensionMismatch("cannot correlate " + std::to_string(a.width) + "x" +
                                std::to_string(a.height) + " against " +
                                std::to_string(b.width) + "x" +
                                std::to_string(b.height));

    const auto& k = kernels::active();
    const std::size_t n = a.values.size();
    std::vector<double> av = a.values;
    std::vector<double> bv = b.values;
    const double mean_a = k.sum(av.data(), n) / static_cast<double>(n);
    const double mean_b = k.sum(bv.data(), n) / static_cast<double>(n);
    for (double& v : av) v -= mean_a;
    for (double& v : bv) v -= mean_b;

    const double norm_a = std::sqrt(k.sumsq(av.data(), n));
    const double norm_b = std::sqrt(k.sumsq(bv.data(), n));
    if (norm_a == 0.0 || norm_b == 0.0)
        throw DegenerateInput("fingerprint has zero variance; correlation undefined");

    auto spec_a = fft::forward_r2c(av.data(), a.height, a.width);
    auto spec_b = fft::forward_r2c(bv.data(), b.height, b.width);
    std::vector<std::complex<double>> prod(spec_a.size());
    k.cmul_conj(reinterpret_cast<double*>(prod.data()),
                reinterpret_cast<const double*>(spec_a.data()),
                reinterpret_cast<const double*>(spec_b.data()), prod.size());

    CorrelationSurface surf;
    surf.width = a.width;
    surf.height = a.height;
    surf.values = fft::inverse_c2r(std::move(prod), a.height, a.width);
    // The inverse transform carries an extra factor of N; fold it into the
    // correlation normalization.
    k.scale(surf.values.data(), 1.0 / (static_cast<double>(n) * norm_a * norm_b),
            surf.values.size());
    return surf;
}

PceReport pce(const CorrelationSurface& surface, const MatcherConfig& cfg) {
    cfg.validate();
    if (surface.width <= 0 || surface.height <= 0 ||
        surface.values.size() !=
            static_cast<std::size_t>(surface.width) * surface.height)
        throw Error("malformed correlation surface");

    const auto& k = kernels::active();
    const std::size_t n = surface.values.size();
    const double total_sq = k.sumsq(surface.values.data(), n);
    if (total_sq == 0.0) throw DegenerateInput("all-zero correlation surface");

    int peak_row = 0, peak_col = 0;
    if (cfg.search_mode == SearchMode::PeakSearch) {
        double best = -1.0;
        for (int r = 0; r < surface.height; ++r) {
            const double* row =
                surface.values.data() + static_cast<std::size_t>(r) * surface.width;
            for (int c = 0; c < surface.width; ++c) {
                const double mag = std::fabs(row[c]);
                if (mag > best) {  // strict: scan order already breaks ties
                    best = mag;
                    peak_row = r;
                    peak_col = c;
                }
            }
        }
    }
    const double peak_corr = surface.at(peak_row, peak_col);

    const int span = 2 * cfg.peak_exclusion_radius + 1;
    const int row_span = std::min(span, surface.height);
    const int col_span = std::min(span, surface.width);
    const std::size_t m = static_cast<std::size_t>(row_span) * col_span;
    if (m >= n)
        throw Error("peak exclusion neighborhood covers the entire surface");

    double excluded_sq = 0.0;
    for (int i = 0; i < row_span; ++i) {
        const int r = ((peak_row - cfg.peak_exclusion_radius + i) % surface.height +
                       surface.height) %
                      surface.height;
        const double* row =
            surface.values.data() + static_cast<std::size_t>(r) * surface.width;
        for (int j = 0; j < col_span; ++j) {
            const int c = ((peak_col - cfg.peak_exclusion_radius + j) % surface.width +
                           surface.width) %
                          surface.width;
            excluded_sq += row[c] * row[c];
        }
    }

    double background = total_sq - excluded_sq;
    if (background < 0.0) background = 0.0;
    if (background == 0.0)
        throw DegenerateInput("correlation surface has no background energy");

    const double mean_sq = background / static_cast<double>(n - m);
    const double sign = peak_corr > 0.0 ? 1.0 : (peak_corr < 0.0 ? -1.0 : 0.0);

    PceReport report;
    report.pce = sign * peak_corr * peak_corr / mean_sq;
    report.peak_row = peak_row;
    report.peak_col = peak_col;
    report.peak_corr = peak_corr;
    report.threshold = cfg.pce_threshold;
    report.accepted = report.pce > cfg.pce_threshold;
    return report;
}

PceReport match_fingerprints(const Fingerprint& known, const Fingerprint& query,
                             const MatcherConfig& cfg) {
    cfg.validate();
    const CorrelationSurface surf = cross_correlate(known, query);
    return pce(surf, cfg);
}

std::string PceReport::to_json() const {
    nlohmann::json j;
    j["pce"] = pce;
    j["peak_row"] = peak_row;
    j["peak_col"] = peak_col;
    j["peak_corr"] = peak_corr;
    j["accepted"] = accepted;
    j["threshold"] = threshold;
    return j.dump();
}

}  // namespace prnu
