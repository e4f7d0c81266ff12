#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prnu/error.hpp"

namespace prnu {

enum class FrameKind : std::uint8_t { Unknown = 0, I, P, B };

const char* to_string(FrameKind k);
FrameKind frame_kind_from_string(const std::string& s);

// One grayscale video frame. Samples are row-major luminance values,
// nominal range [0, 255], stored as double so the downstream signal
// processing never re-quantizes.
struct LuminanceFrame {
    int width = 0;
    int height = 0;
    std::vector<double> samples;
    std::int64_t frame_index = 0;
    FrameKind kind = FrameKind::Unknown;

    LuminanceFrame() = default;
    LuminanceFrame(int w, int h, double fill = 0.0)
        : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t pixel_count() const { return samples.size(); }
    double at(int row, int col) const {
        return samples[static_cast<std::size_t>(row) * width + col];
    }
    double& at(int row, int col) {
        return samples[static_cast<std::size_t>(row) * width + col];
    }

    // Throws Error if dimensions are non-positive, the sample count is
    // inconsistent, or any sample is non-finite.
    void validate() const;
};

// Ordered frames from one source. All frames share dimensions and carry
// strictly increasing frame_index values.
struct FrameSequence {
    std::vector<LuminanceFrame> frames;
    std::string source_id;
    std::optional<double> declared_fps;
    // Set by the selectors when fewer frames were available than requested.
    bool short_supply = false;

    bool empty() const { return frames.empty(); }
    std::size_t size() const { return frames.size(); }
    int width() const { return frames.empty() ? 0 : frames.front().width; }
    int height() const { return frames.empty() ? 0 : frames.front().height; }

    void validate() const;
};

}  // namespace prnu
