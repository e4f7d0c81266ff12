#include "prnu/frame.hpp"

#include <cmath>

namespace prnu {

const char* to_string(FrameKind k) {
    switch (k) {
        case FrameKind::I: return "I";
        case FrameKind::P: return "P";
        case FrameKind::B: return "B";
        default: return "Unknown";
    }
}

FrameKind frame_kind_from_string(const std::string& s) {
    if (s == "I") return FrameKind::I;
    if (s == "P") return FrameKind::P;
    if (s == "B") return FrameKind::B;
    if (s == "Unknown") return FrameKind::Unknown;
    throw Error("unknown frame kind '" + s + "'");
}

void LuminanceFrame::validate() const {
    if (width <= 0 || height <= 0)
        throw Error("frame dimensions must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
    if (samples.size() != static_cast<std::size_t>(width) * height)
        throw Error("frame sample count " + std::to_string(samples.size()) +
                    " does not match " + std::to_string(width) + "x" +
                    std::to_string(height));
    for (double v : samples) {
        if (!std::isfinite(v)) throw Error("frame contains a non-finite sample");
    }
}

void FrameSequence::validate() const {
    if (frames.empty()) throw Error("frame sequence is empty");
    const int w = frames.front().width;
    const int h = frames.front().height;
    std::int64_t prev_index = -1;
    for (const auto& f : frames) {
        f.validate();
        if (f.width != w || f.height != h)
            throw DimensionMismatch(
                "frame sequence mixes dimensions: " + std::to_string(w) + "x" +
                std::to_string(h) + " vs " + std::to_string(f.width) + "x" +
                std::to_string(f.height));
        if (f.frame_index <= prev_index)
            throw Error("frame_index values must be strictly increasing");
        prev_index = f.frame_index;
    }
}

}  // namespace prnu
