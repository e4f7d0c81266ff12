// HTTP front end: route behavior, status codes, frames_ref decoding, and
// agreement between the wire responses and direct library calls.

#include <doctest.h>
#include <httplib.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "prnu/authd/config.hpp"
#include "prnu/authd/http_server.hpp"
#include "prnu/authd/service.hpp"
#include "prnu/error.hpp"
#include "prnu/frame_io.hpp"
#include "prnu/sensor_sim.hpp"
#include "test_util.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

prnu::authd::MeetingPolicy test_policy() {
    prnu::authd::MeetingPolicy policy;
    policy.registration_frame_count = 20;
    policy.query_frame_count = 20;
    return policy;
}

prnu::sim::SensorModel camera(const std::string& id, std::uint64_t seed) {
    return prnu::sim::make_camera(id, 64, 64, 0.02, 2.0, seed);
}

std::string slurp_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Spins up a server on an OS-assigned port with a fresh store and pre-writes
// Y4M footage for two cameras so tests can reference it by path.
struct HttpFixture {
    testutil::TempDir dir;
    prnu::authd::ServiceConfig config;
    prnu::authd::HttpServer server;
    int port;
    httplib::Client client;

    HttpFixture()
        : config(make_config(dir.path())),
          server(config),
          port(server.start_async()),
          client("127.0.0.1", port) {
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
    }

    ~HttpFixture() { server.stop(); }

    static prnu::authd::ServiceConfig make_config(const fs::path& root) {
        prnu::authd::ServiceConfig cfg;
        cfg.store_path = root / "store";
        cfg.policy = test_policy();
        return cfg;
    }

    // Registration clips are written at 1 fps so the one-frame-per-second
    // fallback selector keeps every frame (Y4M carries no frame kinds).
    fs::path write_footage(const std::string& name, const prnu::sim::SensorModel& cam,
                           const std::string& role, int count) {
        const prnu::FrameSequence seq = testutil::camera_frames(cam, role, count);
        const fs::path path = dir.path() / (name + ".y4m");
        std::optional<double> fps;
        if (role == "registration") fps = 1.0;
        prnu::write_y4m_file(path, seq, fps);
        return path;
    }

    json post(const std::string& route, const json& body, int expected_status) {
        auto res = client.Post(route, body.dump(), "application/json");
        REQUIRE(res != nullptr);
        CAPTURE(route);
        CAPTURE(res->body);
        CHECK(res->status == expected_status);
        return json::parse(res->body);
    }
};

}  // namespace

TEST_CASE("base64 helpers round-trip binary data") {
    using prnu::authd::base64_decode;
    using prnu::authd::base64_encode;

    // Lengths covering every padding case, with embedded NUL and high bytes.
    for (std::size_t len : {std::size_t{0}, std::size_t{1}, std::size_t{2}, std::size_t{3},
                            std::size_t{4}, std::size_t{5}, std::size_t{255}}) {
        std::string bytes(len, '\0');
        for (std::size_t i = 0; i < len; ++i) bytes[i] = static_cast<char>((i * 37 + 11) & 0xff);
        const std::string encoded = base64_encode(bytes);
        for (char c : encoded) {
            const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '+' ||
                            c == '/' || c == '=';
            CHECK(ok);
        }
        CHECK(base64_decode(encoded) == bytes);
    }

    CHECK(base64_encode("") == "");
    CHECK_THROWS_AS(base64_decode("!!not base64!!"), prnu::ParseError);
}

TEST_CASE("load_frames_ref accepts paths and inline base64 streams") {
    testutil::TempDir dir;
    const auto cam = camera("ref-cam", 11);
    const prnu::FrameSequence seq = testutil::camera_frames(cam, "query", 3);
    const fs::path y4m = dir.path() / "clip.y4m";
    prnu::write_y4m_file(y4m, seq);

    const prnu::FrameSequence by_path = prnu::authd::load_frames_ref(y4m.string());
    REQUIRE(by_path.frames.size() == 3);

    const std::string inline_ref = "base64:" + prnu::authd::base64_encode(slurp_file(y4m));
    const prnu::FrameSequence by_inline = prnu::authd::load_frames_ref(inline_ref);
    REQUIRE(by_inline.frames.size() == 3);
    for (std::size_t f = 0; f < 3; ++f)
        CHECK(by_inline.frames[f].samples == by_path.frames[f].samples);

    CHECK_THROWS_AS(prnu::authd::load_frames_ref("base64:@@@"), prnu::ParseError);
    CHECK_THROWS_AS(prnu::authd::load_frames_ref((dir.path() / "missing.y4m").string()),
                    prnu::Error);
}

TEST_CASE("POST /register creates a user and reports the fingerprint shape") {
    HttpFixture fx;
    const auto cam = camera("alice-cam", 101);
    const fs::path footage = fx.write_footage("alice_reg", cam, "registration", 20);

    const json body = {{"user_id", "alice"}, {"password", "hunter2-quality"},
                       {"frames_ref", footage.string()}};
    const json reply = fx.post("/register", body, 201);
    CHECK(reply["user_id"] == "alice");
    CHECK(reply["frames_used"] == 20);
    CHECK(reply["width"] == 64);
    CHECK(reply["height"] == 64);
    CHECK(reply.contains("registered_at"));
    CHECK(fx.server.service().user_count() == 1);

    SUBCASE("duplicate registration returns 409") {
        const json dup = fx.post("/register", body, 409);
        CHECK(dup.contains("error"));
        CHECK(fx.server.service().user_count() == 1);
    }

    SUBCASE("short footage returns 422") {
        const fs::path tiny = fx.write_footage("bob_tiny", camera("bob-cam", 102),
                                               "registration", 5);
        const json short_body = {{"user_id", "bob"}, {"password", "pw-pw-pw"},
                                 {"frames_ref", tiny.string()}};
        const json reply422 = fx.post("/register", short_body, 422);
        CHECK(reply422.contains("error"));
    }

    SUBCASE("unreadable frames_ref returns 400") {
        const json bad = {{"user_id", "carol"}, {"password", "pw"},
                          {"frames_ref", (fx.dir.path() / "nope.y4m").string()}};
        CHECK(fx.post("/register", bad, 400).contains("error"));
    }
}

TEST_CASE("malformed request bodies are rejected with 400") {
    HttpFixture fx;

    auto res = fx.client.Post("/register", "this is not json", "application/json");
    REQUIRE(res != nullptr);
    CHECK(res->status == 400);
    CHECK(json::parse(res->body).contains("error"));

    // Valid JSON missing a required field.
    const json incomplete = {{"user_id", "alice"}};
    CHECK(fx.post("/register", incomplete, 400).contains("error"));
    CHECK(fx.post("/join", incomplete, 400).contains("error"));
    const json numeric = {{"challenge_token", 7}, {"password", "x"}};
    CHECK(fx.post("/password", numeric, 400).contains("error"));
}

TEST_CASE("POST /join admits the registered camera without a password") {
    HttpFixture fx;
    const auto cam = camera("alice-cam", 210);
    const fs::path reg = fx.write_footage("reg", cam, "registration", 20);
    fx.post("/register",
            {{"user_id", "alice"}, {"password", "pw-alpha"}, {"frames_ref", reg.string()}},
            201);

    const fs::path query = fx.write_footage("query", cam, "query", 20);
    const json reply =
        fx.post("/join", {{"user_id", "alice"}, {"frames_ref", query.string()}}, 200);
    CHECK(reply["decision"] == "admitted_prnu");
    CHECK(reply["user_id"] == "alice");
    REQUIRE(reply["pce"].is_object());
    CHECK(reply["pce"]["accepted"] == true);
    CHECK(reply["pce"]["pce"].get<double>() > 60.0);
    CHECK_FALSE(reply.contains("challenge_token"));

    SUBCASE("inline base64 footage produces the identical decision and score") {
        const std::string inline_ref =
            "base64:" + prnu::authd::base64_encode(slurp_file(query));
        const json inline_reply =
            fx.post("/join", {{"user_id", "alice"}, {"frames_ref", inline_ref}}, 200);
        CHECK(inline_reply["decision"] == "admitted_prnu");
        CHECK(inline_reply["pce"]["pce"].get<double>() ==
              doctest::Approx(reply["pce"]["pce"].get<double>()).epsilon(1e-12));
    }

    SUBCASE("wire response matches a direct library call on the same store") {
        const prnu::FrameSequence frames = prnu::parse_y4m_file(query);
        const prnu::authd::AuthOutcome direct =
            fx.server.service().request_join("alice", frames);
        CHECK(direct.decision == prnu::authd::Decision::AdmittedPrnu);
        REQUIRE(direct.pce_report.has_value());
        CHECK(direct.pce_report->pce ==
              doctest::Approx(reply["pce"]["pce"].get<double>()).epsilon(1e-12));
    }
}

TEST_CASE("POST /join + /password runs the fallback challenge flow") {
    HttpFixture fx;
    const fs::path reg = fx.write_footage("reg", camera("own-cam", 310), "registration", 20);
    fx.post("/register",
            {{"user_id", "dana"}, {"password", "correct-horse"}, {"frames_ref", reg.string()}},
            201);

    // Footage from a different sensor: PRNU check must fail over to password.
    const fs::path foreign = fx.write_footage("foreign", camera("other-cam", 311), "query", 20);
    const json join =
        fx.post("/join", {{"user_id", "dana"}, {"frames_ref", foreign.string()}}, 200);
    CHECK(join["decision"] == "password_required");
    REQUIRE(join["pce"].is_object());
    CHECK(join["pce"]["accepted"] == false);
    REQUIRE(join.contains("challenge_token"));
    const std::string token = join["challenge_token"].get<std::string>();
    CHECK(token.size() == 32);

    SUBCASE("correct password admits, and the token is single-use") {
        const json ok = fx.post("/password",
                                {{"challenge_token", token}, {"password", "correct-horse"}},
                                200);
        CHECK(ok["decision"] == "admitted_password");
        CHECK(ok["user_id"] == "dana");

        const json reuse = fx.post("/password",
                                   {{"challenge_token", token}, {"password", "correct-horse"}},
                                   404);
        CHECK(reuse.contains("error"));
    }

    SUBCASE("wrong password keeps the challenge alive until attempts run out") {
        for (int attempt = 0; attempt < 2; ++attempt) {
            const json retry = fx.post(
                "/password", {{"challenge_token", token}, {"password", "wrong"}}, 200);
            CHECK(retry["decision"] == "password_required");
            CHECK(retry["challenge_token"] == token);
        }
        const json last =
            fx.post("/password", {{"challenge_token", token}, {"password", "wrong"}}, 200);
        CHECK(last["decision"] == "rejected");
        CHECK(last["reason"] == "attempts_exhausted");

        const json after = fx.post(
            "/password", {{"challenge_token", token}, {"password", "correct-horse"}}, 404);
        CHECK(after.contains("error"));
    }

    SUBCASE("made-up token returns 404") {
        const json bogus = fx.post(
            "/password",
            {{"challenge_token", "00112233445566778899aabbccddeeff"}, {"password", "x"}}, 404);
        CHECK(bogus.contains("error"));
    }
}

TEST_CASE("POST /join for an unknown user is rejected") {
    HttpFixture fx;
    const fs::path query = fx.write_footage("q", camera("cam", 410), "query", 20);
    const json reply =
        fx.post("/join", {{"user_id", "nobody"}, {"frames_ref", query.string()}}, 200);
    CHECK(reply["decision"] == "rejected");
    CHECK(reply["reason"] == "unknown_user");
    CHECK_FALSE(reply.contains("challenge_token"));
}

TEST_CASE("GET /audit returns the NDJSON audit trail") {
    HttpFixture fx;
    const auto cam = camera("cam", 510);
    const fs::path reg = fx.write_footage("reg", cam, "registration", 20);
    const fs::path query = fx.write_footage("query", cam, "query", 20);
    fx.post("/register",
            {{"user_id", "erin"}, {"password", "pass-word"}, {"frames_ref", reg.string()}},
            201);
    fx.post("/join", {{"user_id", "erin"}, {"frames_ref", query.string()}}, 200);
    fx.post("/join", {{"user_id", "ghost"}, {"frames_ref", query.string()}}, 200);

    auto res = fx.client.Get("/audit");
    REQUIRE(res != nullptr);
    CHECK(res->status == 200);

    std::istringstream lines(res->body);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const json record = json::parse(line);
        CHECK(record.contains("ts"));
        CHECK(record.contains("event"));
        CHECK(record.contains("user_id"));
        ++count;
    }
    CHECK(count == 3);
    // The trail must never leak the registered password.
    CHECK(res->body.find("pass-word") == std::string::npos);
}

TEST_CASE("frames_ref accepts a PGM directory with a kind sidecar") {
    HttpFixture fx;
    const auto cam = camera("pgm-cam", 610);
    const prnu::FrameSequence seq = testutil::camera_frames(cam, "registration", 20);

    const fs::path frame_dir = fx.dir.path() / "frames";
    fs::create_directories(frame_dir);
    std::ofstream kinds(frame_dir / prnu::kFrameKindSidecar);
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03zu.pgm", f);
        prnu::write_pgm(frame_dir / name, seq.frames[f]);
        kinds << name << " I\n";
    }
    kinds.close();

    const json reply = fx.post(
        "/register",
        {{"user_id", "frank"}, {"password", "pw-frank"}, {"frames_ref", frame_dir.string()}},
        201);
    CHECK(reply["frames_used"] == 20);
}

TEST_CASE("stop() shuts the listener down") {
    auto fx = std::make_unique<HttpFixture>();
    const int port = fx->port;
    fx->server.stop();

    httplib::Client probe("127.0.0.1", port);
    probe.set_connection_timeout(2);
    auto res = probe.Get("/audit");
    CHECK(res == nullptr);
    fx.reset();  // double-stop via the destructor must be harmless
}
