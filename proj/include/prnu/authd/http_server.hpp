#pragma once

#include <atomic>
#include <memory>
#include <string>

#include "prnu/authd/config.hpp"
#include "prnu/authd/service.hpp"

namespace prnu::authd {

// HTTP/1.1 + JSON front end over AuthService:
//   POST /register  {user_id, password, frames_ref} -> 201 | 409 | 422
//   POST /join      {user_id, frames_ref}           -> 200 {decision, pce, challenge_token?}
//   POST /password  {challenge_token, password}     -> 200 {decision}
//   GET  /audit     -> NDJSON audit records
// frames_ref is either a filesystem path (Y4M file or PGM directory) or
// "base64:<...>" carrying an inline Y4M stream.
class HttpServer {
public:
    explicit HttpServer(ServiceConfig config);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Blocks until stop() is called. Throws Error if the port is taken.
    void run();
    // Binds to an OS-assigned port and serves from a background thread;
    // returns the port. Test hook.
    int start_async();
    void stop();

    AuthService& service();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Decodes a frames_ref value into frames (shared by server and CLI).
FrameSequence load_frames_ref(const std::string& frames_ref);

std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);

}  // namespace prnu::authd
