#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace prnu {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed container data (Y4M/PGM/fingerprint files). Carries the byte
// offset of the defect when it is known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg,
                        std::optional<std::uint64_t> byte_offset = std::nullopt)
        : Error(byte_offset ? msg + " (byte offset " + std::to_string(*byte_offset) + ")"
                            : msg),
          offset(byte_offset) {}

    std::optional<std::uint64_t> offset;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Zero-variance fingerprint, all-zero correlation surface, and similar
// inputs for which the requested statistic is undefined.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

class StoreError : public Error {
public:
    using Error::Error;
};

class AuthError : public Error {
public:
    using Error::Error;
};

}  // namespace prnu
