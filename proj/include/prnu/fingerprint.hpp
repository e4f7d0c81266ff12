#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "prnu/denoise.hpp"
#include "prnu/frame.hpp"

namespace prnu {

// Noise residual of a single frame: input minus its denoised estimate.
struct Residual {
    int width = 0;
    int height = 0;
    std::vector<double> values;
};

// Estimated sensor pattern: the per-camera multiplicative gain recovered
// by averaging residuals. This is the credential object the admission
// service stores and matches against.
struct Fingerprint {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    std::uint32_t frames_used = 0;
    std::string source_label;
    std::int64_t created_at = 0;  // unix seconds
    bool postprocessed = false;

    std::size_t pixel_count() const { return values.size(); }
    void validate() const;
};

struct FingerprintQuality {
    double mean = 0.0;
    double variance = 0.0;  // population variance
    double min = 0.0;
    double max = 0.0;
};

Residual compute_residual(const LuminanceFrame& frame, const DenoiserConfig& cfg);

// Streaming accumulator so long sequences never need all residuals in
// memory at once. Addition order is fixed by the caller; the result is
// the plain average of everything added.
class FingerprintAccumulator {
public:
    FingerprintAccumulator() = default;

    void add(const Residual& r);
    // Maximum-likelihood weighting accumulates residual*frame and frame^2.
    void add_weighted(const Residual& r, const LuminanceFrame& frame);

    std::size_t count() const { return count_; }

    // Plain average (sum / count). Throws Error when nothing was added.
    Fingerprint average(bool postprocess) const;
    // Weighted estimate sum(W*I) / sum(I^2); requires add_weighted.
    Fingerprint weighted(bool postprocess) const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> sum_;
    std::vector<double> weight_;  // sum of I^2, only for the ML path
    std::size_t count_ = 0;
    bool weighted_mode_ = false;
};

struct EstimatorOptions {
    bool postprocess = true;  // zero-mean rows then columns
    bool ml_weighting = false;
    unsigned threads = 1;
};

// Average the residuals of every frame in `seq`. Residual computation may
// run on several threads; accumulation happens in frame order regardless.
Fingerprint estimate_fingerprint(const FrameSequence& seq, const DenoiserConfig& cfg,
                                 const EstimatorOptions& opts = {});

// Subtract each row's mean, then each column's mean, in place.
void zero_mean_rows_cols(std::vector<double>& values, int width, int height);

FingerprintQuality fingerprint_quality(const Fingerprint& fp);

// PRNUFP1 container: magic "PRNUFP1\0", LE u32 width/height/frames_used,
// u8 postprocessed flag, 3 reserved zero bytes, row-major LE float32
// values, LE u64 CRC-64 of all preceding bytes.
void save_fingerprint(const Fingerprint& fp, const std::filesystem::path& path);
Fingerprint load_fingerprint(const std::filesystem::path& path);

// Round every value through float32, matching what PRNUFP1 stores. Applied
// at registration time so persisted and in-memory credentials are equal.
void quantize_to_storage(Fingerprint& fp);

}  // namespace prnu
