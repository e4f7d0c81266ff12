#pragma once

#include <cstddef>
#include <cstdint>

namespace prnu {

// CRC-64/XZ (reflected ECMA-182 polynomial, init and xorout all-ones).
std::uint64_t crc64(const void* data, std::size_t len, std::uint64_t seed = 0);

}  // namespace prnu
