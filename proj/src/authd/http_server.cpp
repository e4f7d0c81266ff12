#include "prnu/authd/http_server.hpp"

#include <httplib.h>
#include <sodium.h>

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <thread>

#include "prnu/error.hpp"
#include "prnu/frame_io.hpp"

namespace prnu::authd {

namespace {

void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump() + "\n", "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
    reply_json(res, status, nlohmann::json{{"error", message}});
}

// Parses the request body and pulls the required string fields; returns
// false after filling an error response.
bool parse_body(const httplib::Request& req, httplib::Response& res,
                std::initializer_list<const char*> required, nlohmann::json& out) {
    try {
        out = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
        reply_error(res, 400, std::string("invalid JSON body: ") + e.what());
        return false;
    }
    for (const char* field : required) {
        if (!out.contains(field) || !out[field].is_string()) {
            reply_error(res, 400, std::string("missing string field: ") + field);
            return false;
        }
    }
    return true;
}

}  // namespace

std::string base64_encode(const std::string& bytes) {
    const std::size_t out_len =
        sodium_base64_encoded_len(bytes.size(), sodium_base64_VARIANT_ORIGINAL);
    std::string out(out_len, '\0');
    sodium_bin2base64(out.data(), out.size(),
                      reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(),
                      sodium_base64_VARIANT_ORIGINAL);
    out.resize(out.find('\0'));  // strip the terminator slot
    return out;
}

std::string base64_decode(const std::string& text) {
    std::string out(text.size(), '\0');
    std::size_t out_len = 0;
    if (sodium_base642bin(reinterpret_cast<unsigned char*>(out.data()), out.size(),
                          text.data(), text.size(), nullptr, &out_len, nullptr,
                          sodium_base64_VARIANT_ORIGINAL) != 0)
        throw ParseError("invalid base64 payload");
    out.resize(out_len);
    return out;
}

FrameSequence load_frames_ref(const std::string& frames_ref) {
    constexpr const char* kInlinePrefix = "base64:";
    if (frames_ref.rfind(kInlinePrefix, 0) == 0) {
        const std::string decoded = base64_decode(frames_ref.substr(7));
        std::istringstream stream(decoded);
        return parse_y4m(stream, "inline");
    }
    return load_frames_path(frames_ref);
}

struct HttpServer::Impl {
    explicit Impl(ServiceConfig cfg)
        : config(std::move(cfg)),
          service(config.store_path, config.policy, config.denoiser) {
        install_routes();
    }

    ~Impl() {
        server.stop();
        if (worker.joinable()) worker.join();
    }

    void install_routes() {
        server.Post("/register", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body;
            if (!parse_body(req, res, {"user_id", "password", "frames_ref"}, body)) return;
            try {
                const FrameSequence frames =
                    load_frames_ref(body["frames_ref"].get<std::string>());
                const UserRecord rec = service.register_user(
                    body["user_id"].get<std::string>(), frames,
                    body["password"].get<std::string>());
                nlohmann::json summary;
                summary["user_id"] = rec.user_id;
                summary["frames_used"] = rec.fingerprint->frames_used;
                summary["width"] = rec.fingerprint->width;
                summary["height"] = rec.fingerprint->height;
                summary["registered_at"] = rec.registered_at;
                reply_json(res, 201, summary);
            } catch (const DuplicateUser& e) {
                reply_error(res, 409, e.what());
            } catch (const InsufficientFrames& e) {
                reply_error(res, 422, e.what());
            } catch (const Error& e) {
                reply_error(res, 400, e.what());
            }
        });

        server.Post("/join", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body;
            if (!parse_body(req, res, {"user_id", "frames_ref"}, body)) return;
            try {
                const FrameSequence frames =
                    load_frames_ref(body["frames_ref"].get<std::string>());
                const AuthOutcome outcome =
                    service.request_join(body["user_id"].get<std::string>(), frames);
                reply_json(res, 200, nlohmann::json::parse(outcome.to_json()));
            } catch (const Error& e) {
                reply_error(res, 400, e.what());
            }
        });

        server.Post("/password", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body;
            if (!parse_body(req, res, {"challenge_token", "password"}, body)) return;
            try {
                const AuthOutcome outcome = service.submit_password(
                    body["challenge_token"].get<std::string>(),
                    body["password"].get<std::string>());
                reply_json(res, 200, nlohmann::json::parse(outcome.to_json()));
            } catch (const InvalidToken& e) {
                reply_error(res, 404, e.what());
            } catch (const Error& e) {
                reply_error(res, 400, e.what());
            }
        });

        server.Get("/audit", [this](const httplib::Request&, httplib::Response& res) {
            std::ifstream in(service.audit_log_path(), std::ios::binary);
            std::string content;
            if (in)
                content.assign((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
            res.status = 200;
            res.set_content(content, "application/x-ndjson");
        });
    }

    ServiceConfig config;
    AuthService service;
    httplib::Server server;
    std::thread worker;
};

HttpServer::HttpServer(ServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpServer::~HttpServer() = default;

void HttpServer::run() {
    if (!impl_->server.listen(impl_->config.host, impl_->config.port))
        throw Error("cannot listen on " + impl_->config.host + ":" +
                    std::to_string(impl_->config.port));
}

int HttpServer::start_async() {
    const int port = impl_->server.bind_to_any_port(impl_->config.host);
    if (port <= 0) throw Error("cannot bind to " + impl_->config.host);
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void HttpServer::stop() {
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

AuthService& HttpServer::service() { return impl_->service; }

}  // namespace prnu::authd
