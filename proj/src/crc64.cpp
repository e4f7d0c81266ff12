#include "prnu/crc64.hpp"

#include <array>

namespace prnu {
namespace {

constexpr std::uint64_t kPoly = 0xC96C5795D7870F42ULL;  // reflected ECMA-182

std::array<std::uint64_t, 256> build_table() {
    std::array<std::uint64_t, 256> table{};
    for (std::uint64_t i = 0; i < 256; ++i) {
        std::uint64_t crc = i;
        for (int bit = 0; bit < 8; ++bit) {
            crc = (crc & 1) ? (crc >> 1) ^ kPoly : crc >> 1;
        }
        table[i] = crc;
    }
    return table;
}

}  // namespace

std::uint64_t crc64(const void* data, std::size_t len, std::uint64_t seed) {
    static const auto table = build_table();
    std::uint64_t crc = ~seed;
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        crc = table[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
    }
    return ~crc;
}

}  // namespace prnu
