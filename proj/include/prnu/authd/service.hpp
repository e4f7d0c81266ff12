#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "prnu/authd/store.hpp"
#include "prnu/denoise.hpp"
#include "prnu/frame.hpp"
#include "prnu/matcher.hpp"

namespace prnu::authd {

// Registration failure subtypes so callers (HTTP layer) can map them to
// distinct statuses without string matching.
class DuplicateUser : public AuthError {
public:
    using AuthError::AuthError;
};

class InsufficientFrames : public AuthError {
public:
    using AuthError::AuthError;
};

class InvalidToken : public AuthError {
public:
    using AuthError::AuthError;
};

struct MeetingPolicy {
    MatcherConfig matcher;
    int query_frame_count = 100;
    int registration_frame_count = 60;
    int password_attempt_limit = 3;
    int registration_floor = 10;      // fewer usable frames than this is refused
    std::int64_t token_ttl_seconds = 300;

    void validate() const;
};

enum class Decision { AdmittedPrnu, AdmittedPassword, PasswordRequired, Rejected };

const char* to_string(Decision d);

struct AuthOutcome {
    Decision decision = Decision::Rejected;
    std::optional<PceReport> pce_report;
    std::string user_id;
    std::string timestamp;
    std::optional<std::string> challenge_token;
    std::string reason;  // empty on the happy path

    std::string to_json() const;
};

// The meeting-admission gateway: one-time fingerprint registration,
// per-join verification, password fallback with single-use challenge
// tokens, and an append-only audit trail. All state persists under the
// store directory after every mutation.
class AuthService {
public:
    AuthService(std::filesystem::path store_dir, MeetingPolicy policy,
                DenoiserConfig denoiser);

    // Selects registration frames per policy, estimates the fingerprint,
    // and persists the record. Throws AuthError on duplicate user or
    // short supply below the floor.
    UserRecord register_user(const std::string& user_id,
                             const FrameSequence& registration_frames,
                             const std::string& password);

    // PRNU pass admits immediately; a failed or impossible match degrades
    // to password_required with a challenge token. Unknown users are
    // rejected. Every call appends one audit record.
    AuthOutcome request_join(const std::string& user_id, const FrameSequence& query_frames);

    // Consumes one attempt; a correct password admits and burns the
    // token, exhausting the attempt budget rejects and burns the token.
    // Throws AuthError for unknown, expired, or consumed tokens.
    AuthOutcome submit_password(const std::string& challenge_token,
                                const std::string& password);

    const MeetingPolicy& policy() const { return policy_; }
    const DenoiserConfig& denoiser() const { return denoiser_; }
    std::filesystem::path store_dir() const { return store_dir_; }
    std::filesystem::path audit_log_path() const;

    std::size_t user_count();

private:
    void append_audit(const std::string& event, const std::string& user_id,
                      const std::string& detail_json);
    void persist_locked();
    std::string issue_challenge_locked(const std::string& user_id,
                                       const std::string& session);
    void prune_expired_locked(std::int64_t now);

    std::filesystem::path store_dir_;
    MeetingPolicy policy_;
    DenoiserConfig denoiser_;
    UserStore store_;
    std::mutex mu_;        // store + challenges
    std::mutex audit_mu_;  // serialized appends
};

std::string current_timestamp();
std::int64_t current_unix_seconds();

}  // namespace prnu::authd
