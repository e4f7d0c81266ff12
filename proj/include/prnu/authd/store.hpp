#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "prnu/fingerprint.hpp"

namespace prnu::authd {

struct UserRecord {
    std::string user_id;
    std::shared_ptr<const Fingerprint> fingerprint;
    std::string password_hash;
    std::string registered_at;  // ISO-8601 UTC
};

struct PendingChallenge {
    std::string token;
    std::string user_id;
    std::string session;
    std::int64_t expires_at = 0;  // unix seconds
    int attempts_left = 0;
};

// Directory-backed participant store: index.json plus one PRNUFP1 file
// per user, and challenges.json for outstanding password fallbacks.
// Saves are write-temp-then-rename. A fingerprint file that fails its
// CRC quarantines that record; the rest of the store still loads.
class UserStore {
public:
    UserStore() = default;

    static UserStore load(const std::filesystem::path& dir);
    void save(const std::filesystem::path& dir) const;

    bool contains(const std::string& user_id) const;
    const UserRecord* find(const std::string& user_id) const;
    void insert(UserRecord record);
    std::size_t size() const { return records_.size(); }

    const std::map<std::string, UserRecord>& records() const { return records_; }
    const std::vector<std::string>& quarantined() const { return quarantined_; }

    std::map<std::string, PendingChallenge>& challenges() { return challenges_; }
    const std::map<std::string, PendingChallenge>& challenges() const {
        return challenges_;
    }

private:
    std::map<std::string, UserRecord> records_;
    std::map<std::string, PendingChallenge> challenges_;
    std::vector<std::string> quarantined_;
};

// Filesystem name for a user's fingerprint file.
std::string fingerprint_filename(const std::string& user_id);

}  // namespace prnu::authd
