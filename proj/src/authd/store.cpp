#include "prnu/authd/store.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>

#include "prnu/authd/service.hpp"
#include "prnu/error.hpp"

namespace prnu::authd {

namespace {

// Writes `content` atomically: temp file in the same directory, then rename.
void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StoreError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw StoreError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

std::string fingerprint_filename(const std::string& user_id) {
    // Percent-encode anything outside [A-Za-z0-9_-] so arbitrary user ids
    // map to unique, filesystem-safe names.
    static const char* hex = "0123456789ABCDEF";
    std::string name;
    name.reserve(user_id.size() + 8);
    for (unsigned char ch : user_id) {
        const bool safe = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                          (ch >= '0' && ch <= '9') || ch == '_' || ch == '-';
        if (safe) {
            name.push_back(static_cast<char>(ch));
        } else {
            name.push_back('%');
            name.push_back(hex[ch >> 4]);
            name.push_back(hex[ch & 0xf]);
        }
    }
    return name + ".prnufp";
}

UserStore UserStore::load(const std::filesystem::path& dir) {
    UserStore store;
    const std::filesystem::path index_path = dir / "index.json";
    if (!std::filesystem::exists(index_path)) return store;

    std::ifstream in(index_path);
    if (!in) throw StoreError("cannot open " + index_path.string());
    nlohmann::json index;
    try {
        in >> index;
    } catch (const nlohmann::json::exception& e) {
        throw StoreError("corrupt store index " + index_path.string() + ": " + e.what());
    }

    try {
        for (const auto& u : index.at("users")) {
            UserRecord rec;
            rec.user_id = u.at("user_id").get<std::string>();
            rec.password_hash = u.at("password_hash").get<std::string>();
            rec.registered_at = u.at("registered_at").get<std::string>();
            const std::string file = u.at("fingerprint_file").get<std::string>();
            try {
                rec.fingerprint =
                    std::make_shared<const Fingerprint>(load_fingerprint(dir / file));
            } catch (const Error&) {
                store.quarantined_.push_back(rec.user_id);
                continue;
            }
            store.records_.emplace(rec.user_id, std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw StoreError("corrupt store index " + index_path.string() + ": " + e.what());
    }

    const std::filesystem::path challenge_path = dir / "challenges.json";
    if (std::filesystem::exists(challenge_path)) {
        std::ifstream cin_(challenge_path);
        if (!cin_) throw StoreError("cannot open " + challenge_path.string());
        nlohmann::json cj;
        try {
            cin_ >> cj;
            for (const auto& c : cj.at("challenges")) {
                PendingChallenge ch;
                ch.token = c.at("token").get<std::string>();
                ch.user_id = c.at("user_id").get<std::string>();
                ch.session = c.at("session").get<std::string>();
                ch.expires_at = c.at("expires_at").get<std::int64_t>();
                ch.attempts_left = c.at("attempts_left").get<int>();
                store.challenges_.emplace(ch.token, std::move(ch));
            }
        } catch (const nlohmann::json::exception& e) {
            throw StoreError("corrupt challenge file " + challenge_path.string() + ": " +
                             e.what());
        }
    }
    return store;
}

void UserStore::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);

    nlohmann::json index;
    index["users"] = nlohmann::json::array();
    for (const auto& [user_id, rec] : records_) {
        const std::string file = fingerprint_filename(user_id);

        const std::filesystem::path fp_tmp = dir / (file + ".tmp");
        save_fingerprint(*rec.fingerprint, fp_tmp);
        std::filesystem::rename(fp_tmp, dir / file);

        nlohmann::json u;
        u["user_id"] = user_id;
        u["password_hash"] = rec.password_hash;
        u["registered_at"] = rec.registered_at;
        u["fingerprint_file"] = file;
        index["users"].push_back(std::move(u));
    }
    atomic_write(dir / "index.json", index.dump(2) + "\n");

    nlohmann::json cj;
    cj["challenges"] = nlohmann::json::array();
    for (const auto& [token, ch] : challenges_) {
        nlohmann::json c;
        c["token"] = token;
        c["user_id"] = ch.user_id;
        c["session"] = ch.session;
        c["expires_at"] = ch.expires_at;
        c["attempts_left"] = ch.attempts_left;
        cj["challenges"].push_back(std::move(c));
    }
    atomic_write(dir / "challenges.json", cj.dump(2) + "\n");
}

bool UserStore::contains(const std::string& user_id) const {
    return records_.count(user_id) != 0;
}

const UserRecord* UserStore::find(const std::string& user_id) const {
    const auto it = records_.find(user_id);
    return it == records_.end() ? nullptr : &it->second;
}

void UserStore::insert(UserRecord record) {
    const std::string id = record.user_id;
    if (!records_.emplace(id, std::move(record)).second)
        throw DuplicateUser("user already registered: " + id);
}

}  // namespace prnu::authd
