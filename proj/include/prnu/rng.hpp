#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace prnu {

// Deterministic N(0,1) stream: mt19937_64 plus an explicit Box-Muller
// transform. std::normal_distribution is implementation-defined, so the
// transform is spelled out here to keep generated datasets byte-identical
// across standard libraries.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stable seed derivation for independent substreams, e.g.
// derive_seed(root, "cam03/query", frame_index). FNV-1a over the label,
// finalized with splitmix64 so nearby inputs decorrelate.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t index = 0);

}  // namespace prnu
