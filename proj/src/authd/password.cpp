#include "prnu/authd/password.hpp"

#include <sodium.h>

#include <vector>

#include "prnu/error.hpp"

namespace prnu::authd {

namespace {
void ensure_sodium() {
    static const int rc = sodium_init();  // idempotent; thread-safe via magic static
    if (rc < 0) throw Error("libsodium initialization failed");
}
}  // namespace

std::string hash_password(const std::string& password) {
    ensure_sodium();
    char out[crypto_pwhash_STRBYTES];
    if (crypto_pwhash_str(out, password.c_str(), password.size(),
                          crypto_pwhash_OPSLIMIT_INTERACTIVE,
                          crypto_pwhash_MEMLIMIT_INTERACTIVE) != 0)
        throw AuthError("password hashing failed");
    return std::string(out);
}

bool verify_password(const std::string& encoded_hash, const std::string& password) {
    ensure_sodium();
    if (encoded_hash.empty() || encoded_hash.size() >= crypto_pwhash_STRBYTES)
        return false;
    return crypto_pwhash_str_verify(encoded_hash.c_str(), password.c_str(),
                                    password.size()) == 0;
}

std::string random_token(std::size_t bytes) {
    ensure_sodium();
    std::vector<unsigned char> buf(bytes);
    randombytes_buf(buf.data(), buf.size());
    std::vector<char> hex(bytes * 2 + 1);
    sodium_bin2hex(hex.data(), hex.size(), buf.data(), buf.size());
    return std::string(hex.data());
}

}  // namespace prnu::authd
