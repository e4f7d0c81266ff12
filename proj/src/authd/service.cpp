#include "prnu/authd/service.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>

#include "prnu/authd/password.hpp"
#include "prnu/fingerprint.hpp"
#include "prnu/frame_io.hpp"
#include "prnu/parallel.hpp"

namespace prnu::authd {

std::string current_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::int64_t current_unix_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void MeetingPolicy::validate() const {
    matcher.validate();
    if (query_frame_count < 1) throw Error("query_frame_count must be >= 1");
    if (registration_frame_count < 1)
        throw Error("registration_frame_count must be >= 1");
    if (password_attempt_limit < 1) throw Error("password_attempt_limit must be >= 1");
    if (registration_floor < 1) throw Error("registration_floor must be >= 1");
    if (token_ttl_seconds < 1) throw Error("token_ttl_seconds must be >= 1");
}

const char* to_string(Decision d) {
    switch (d) {
        case Decision::AdmittedPrnu: return "admitted_prnu";
        case Decision::AdmittedPassword: return "admitted_password";
        case Decision::PasswordRequired: return "password_required";
        case Decision::Rejected: return "rejected";
    }
    return "rejected";
}

std::string AuthOutcome::to_json() const {
    nlohmann::json j;
    j["decision"] = to_string(decision);
    j["user_id"] = user_id;
    j["timestamp"] = timestamp;
    if (pce_report) {
        j["pce"] = nlohmann::json::parse(pce_report->to_json());
    } else {
        j["pce"] = nullptr;
    }
    if (challenge_token) j["challenge_token"] = *challenge_token;
    if (!reason.empty()) j["reason"] = reason;
    return j.dump();
}

namespace {

// Zeroed report for outcomes where no meaningful correlation exists
// (dimension mismatch, degenerate input, repeated password prompts); keeps
// the password_required => report-present-and-not-accepted invariant.
PceReport non_match_report(const MatcherConfig& cfg) {
    PceReport r;
    r.pce = 0.0;
    r.peak_row = 0;
    r.peak_col = 0;
    r.peak_corr = 0.0;
    r.accepted = false;
    r.threshold = cfg.pce_threshold;
    return r;
}

}  // namespace

AuthService::AuthService(std::filesystem::path store_dir, MeetingPolicy policy,
                         DenoiserConfig denoiser)
    : store_dir_(std::move(store_dir)), policy_(std::move(policy)),
      denoiser_(std::move(denoiser)) {
    policy_.validate();
    denoiser_.validate();
    std::filesystem::create_directories(store_dir_);
    store_ = UserStore::load(store_dir_);
}

std::filesystem::path AuthService::audit_log_path() const {
    return store_dir_ / "audit.ndjson";
}

std::size_t AuthService::user_count() {
    std::lock_guard<std::mutex> lock(mu_);
    return store_.size();
}

void AuthService::append_audit(const std::string& event, const std::string& user_id,
                               const std::string& detail_json) {
    nlohmann::json j;
    j["ts"] = current_timestamp();
    j["event"] = event;
    j["user_id"] = user_id;
    j["detail"] = nlohmann::json::parse(detail_json);

    std::lock_guard<std::mutex> lock(audit_mu_);
    std::ofstream out(audit_log_path(), std::ios::app);
    if (!out) throw StoreError("cannot append to audit log");
    out << j.dump() << "\n";
    out.flush();
    if (!out) throw StoreError("audit append failed");
}

void AuthService::persist_locked() { store_.save(store_dir_); }

std::string AuthService::issue_challenge_locked(const std::string& user_id,
                                                const std::string& session) {
    PendingChallenge ch;
    ch.token = random_token(16);  // 128-bit
    ch.user_id = user_id;
    ch.session = session;
    ch.expires_at = current_unix_seconds() + policy_.token_ttl_seconds;
    ch.attempts_left = policy_.password_attempt_limit;
    const std::string token = ch.token;
    store_.challenges().emplace(token, std::move(ch));
    return token;
}

void AuthService::prune_expired_locked(std::int64_t now) {
    auto& challenges = store_.challenges();
    for (auto it = challenges.begin(); it != challenges.end();) {
        if (it->second.expires_at <= now)
            it = challenges.erase(it);
        else
            ++it;
    }
}

UserRecord AuthService::register_user(const std::string& user_id,
                                      const FrameSequence& registration_frames,
                                      const std::string& password) {
    if (user_id.empty()) throw AuthError("user_id must not be empty");

    {
        std::lock_guard<std::mutex> lock(mu_);
        if (store_.contains(user_id)) {
            append_audit("register", user_id, R"({"status":"duplicate"})");
            throw DuplicateUser("user already registered: " + user_id);
        }
    }

    const FrameSequence selected = select_registration_frames(
        registration_frames, static_cast<std::size_t>(policy_.registration_frame_count));
    if (selected.frames.size() < static_cast<std::size_t>(policy_.registration_floor)) {
        nlohmann::json detail;
        detail["status"] = "insufficient_frames";
        detail["frames_available"] = selected.frames.size();
        detail["floor"] = policy_.registration_floor;
        append_audit("register", user_id, detail.dump());
        throw InsufficientFrames(
            "registration needs at least " + std::to_string(policy_.registration_floor) +
            " usable frames, got " + std::to_string(selected.frames.size()));
    }

    EstimatorOptions est;
    est.postprocess = true;
    est.threads = default_thread_count();
    Fingerprint fp = estimate_fingerprint(selected, denoiser_, est);
    fp.source_label = user_id;
    // Keep the in-memory credential identical to its on-disk PRNUFP1 form
    // so store round-trips cannot change decisions.
    quantize_to_storage(fp);

    UserRecord record;
    record.user_id = user_id;
    record.fingerprint = std::make_shared<const Fingerprint>(std::move(fp));
    record.password_hash = hash_password(password);
    record.registered_at = current_timestamp();

    {
        std::lock_guard<std::mutex> lock(mu_);
        store_.insert(record);  // re-checks duplicates; first writer wins
        persist_locked();
    }

    nlohmann::json detail;
    detail["status"] = "ok";
    detail["frames_used"] = record.fingerprint->frames_used;
    append_audit("register", user_id, detail.dump());
    return record;
}

AuthOutcome AuthService::request_join(const std::string& user_id,
                                      const FrameSequence& query_frames) {
    AuthOutcome outcome;
    outcome.user_id = user_id;
    outcome.timestamp = current_timestamp();

    std::shared_ptr<const Fingerprint> known;
    {
        std::lock_guard<std::mutex> lock(mu_);
        prune_expired_locked(current_unix_seconds());
        const UserRecord* rec = store_.find(user_id);
        if (rec) known = rec->fingerprint;
    }

    if (!known) {
        outcome.decision = Decision::Rejected;
        outcome.reason = "unknown_user";
        nlohmann::json detail;
        detail["decision"] = to_string(outcome.decision);
        detail["reason"] = outcome.reason;
        append_audit("join", user_id, detail.dump());
        return outcome;
    }

    // Heavy lifting happens outside the store lock.
    const FrameSequence selected = select_query_frames(
        query_frames, static_cast<std::size_t>(policy_.query_frame_count));
    EstimatorOptions est;
    est.postprocess = true;
    est.threads = default_thread_count();

    bool matched = false;
    try {
        const Fingerprint query = estimate_fingerprint(selected, denoiser_, est);
        const PceReport report = match_fingerprints(*known, query, policy_.matcher);
        outcome.pce_report = report;
        matched = report.accepted;
    } catch (const DimensionMismatch&) {
        outcome.pce_report = non_match_report(policy_.matcher);
        outcome.reason = "dimension_mismatch";
    } catch (const DegenerateInput&) {
        outcome.pce_report = non_match_report(policy_.matcher);
        outcome.reason = "degenerate_query";
    }

    if (matched) {
        outcome.decision = Decision::AdmittedPrnu;
    } else {
        outcome.decision = Decision::PasswordRequired;
        std::lock_guard<std::mutex> lock(mu_);
        const std::string session = random_token(8);
        outcome.challenge_token = issue_challenge_locked(user_id, session);
        persist_locked();
    }

    nlohmann::json detail;
    detail["decision"] = to_string(outcome.decision);
    detail["pce"] = nlohmann::json::parse(outcome.pce_report->to_json());
    if (!outcome.reason.empty()) detail["reason"] = outcome.reason;
    append_audit("join", user_id, detail.dump());
    return outcome;
}

AuthOutcome AuthService::submit_password(const std::string& challenge_token,
                                         const std::string& password) {
    AuthOutcome outcome;
    outcome.timestamp = current_timestamp();

    std::lock_guard<std::mutex> lock(mu_);
    prune_expired_locked(current_unix_seconds());
    auto& challenges = store_.challenges();
    const auto it = challenges.find(challenge_token);
    if (it == challenges.end()) {
        append_audit("password", "", R"({"status":"invalid_token"})");
        throw InvalidToken("invalid, expired, or consumed challenge token");
    }
    PendingChallenge& ch = it->second;
    outcome.user_id = ch.user_id;

    const UserRecord* rec = store_.find(ch.user_id);
    const bool ok = rec != nullptr && verify_password(rec->password_hash, password);

    nlohmann::json detail;
    if (ok) {
        outcome.decision = Decision::AdmittedPassword;
        challenges.erase(it);
        detail["status"] = "ok";
    } else {
        ch.attempts_left -= 1;
        if (ch.attempts_left <= 0) {
            outcome.decision = Decision::Rejected;
            outcome.reason = "attempts_exhausted";
            challenges.erase(it);
            detail["status"] = "attempts_exhausted";
        } else {
            outcome.decision = Decision::PasswordRequired;
            outcome.pce_report = non_match_report(policy_.matcher);
            outcome.challenge_token = challenge_token;
            outcome.reason = "bad_password";
            detail["status"] = "bad_password";
            detail["attempts_left"] = ch.attempts_left;
        }
    }
    persist_locked();

    detail["decision"] = to_string(outcome.decision);
    append_audit("password", outcome.user_id, detail.dump());
    return outcome;
}

}  // namespace prnu::authd
