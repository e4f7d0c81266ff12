#pragma once

#include <string>

namespace prnu::authd {

// Argon2id (libsodium crypto_pwhash_str) with a per-hash random 16-byte
// salt embedded in the encoded string. Parameters are the interactive
// profile, which lands well above the 10 ms verification floor the
// service requires of its password path.
std::string hash_password(const std::string& password);

// Constant-time comparison inside libsodium.
bool verify_password(const std::string& encoded_hash, const std::string& password);

// Hex token from the CSPRNG, `bytes` bytes of entropy.
std::string random_token(std::size_t bytes = 16);

}  // namespace prnu::authd
