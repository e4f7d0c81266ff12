#pragma once

#include <string>
#include <vector>

#include "prnu/fingerprint.hpp"

namespace prnu {

enum class SearchMode { PeakSearch, ZeroShiftOnly };

const char* to_string(SearchMode m);
SearchMode search_mode_from_string(const std::string& s);

struct MatcherConfig {
    double pce_threshold = 60.0;
    int peak_exclusion_radius = 5;  // 11x11 neighborhood by default
    SearchMode search_mode = SearchMode::PeakSearch;

    void validate() const;
};

// Correlation over all circular shifts, normalized so a self-match peaks
// at exactly 1.
struct CorrelationSurface {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major, index = shift_row * width + shift_col

    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    std::size_t count() const { return values.size(); }
};

struct PceReport {
    double pce = 0.0;
    int peak_row = 0;
    int peak_col = 0;
    double peak_corr = 0.0;
    bool accepted = false;
    double threshold = 0.0;

    std::string to_json() const;
};

// Circular normalized cross-correlation of two same-size fingerprints,
// computed through the frequency domain. Both inputs are mean-subtracted.
// Throws DimensionMismatch or DegenerateInput (zero variance).
CorrelationSurface cross_correlate(const Fingerprint& a, const Fingerprint& b);

// Peak-to-correlation-energy of a surface: signed squared peak over the
// mean square of the surface outside a square neighborhood of the peak
// (wrapping at the edges). Ties in the peak search break toward the
// smallest row, then the smallest column.
PceReport pce(const CorrelationSurface& surface, const MatcherConfig& cfg);

PceReport match_fingerprints(const Fingerprint& known, const Fingerprint& query,
                             const MatcherConfig& cfg);

}  // namespace prnu
