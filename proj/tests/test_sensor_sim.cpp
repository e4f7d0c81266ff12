#include <doctest.h>

#include <prnu/error.hpp>
#include <prnu/frame_io.hpp>
#include <prnu/rng.hpp>
#include <prnu/sensor_sim.hpp>

#include "test_util.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <vector>

using prnu::FrameSequence;
using prnu::LuminanceFrame;
using namespace prnu::sim;

TEST_CASE("identical parameters produce a bitwise-identical camera") {
    SensorModel a = make_camera("cam", 64, 48, 0.02, 2.0, 12345);
    SensorModel b = make_camera("cam", 64, 48, 0.02, 2.0, 12345);
    REQUIRE(a.k.size() == b.k.size());
    for (std::size_t i = 0; i < a.k.size(); ++i)
        CHECK(a.k[i] == b.k[i]);
}

TEST_CASE("different seeds give effectively uncorrelated patterns") {
    SensorModel a = make_camera("a", 128, 128, 0.02, 2.0, 1);
    SensorModel b = make_camera("b", 128, 128, 0.02, 2.0, 2);
    const double corr = testutil::correlation_of(a.k, b.k);
    CHECK(std::abs(corr) < 5.0 / std::sqrt(128.0 * 128.0));
}

TEST_CASE("pattern statistics match the requested strength") {
    SensorModel cam = make_camera("s", 128, 128, 0.02, 2.0, 3);
    const double mean = testutil::mean_of(cam.k);
    const double stddev = std::sqrt(testutil::variance_of(cam.k));
    // The pattern is mean-centered at construction; re-summing leaves only
    // accumulation rounding, far inside the statistical bound.
    CHECK(std::abs(mean) < 1e-15);
    CHECK(std::abs(mean) < 3.0 * 0.02 / std::sqrt(128.0 * 128.0));
    CHECK(stddev > 0.018);
    CHECK(stddev < 0.022);
}

TEST_CASE("camera construction validates its inputs") {
    CHECK_THROWS_AS(make_camera("x", 0, 16, 0.02, 2.0, 1), prnu::Error);
    CHECK_THROWS_AS(make_camera("x", 16, -4, 0.02, 2.0, 1), prnu::Error);
    CHECK_THROWS_AS(make_camera("x", 16, 16, 0.0, 2.0, 1), prnu::Error);
    CHECK_THROWS_AS(make_camera("x", 16, 16, 0.02, -1.0, 1), prnu::Error);
}

TEST_CASE("noise-free capture through a zero-pattern camera is the identity") {
    SensorModel cam = make_camera("id", 16, 16, 0.02, 0.0, 4);
    std::fill(cam.k.begin(), cam.k.end(), 0.0);
    LuminanceFrame scene = testutil::random_frame(16, 16, 5, 16.0, 240.0);
    prnu::GaussianStream rng(0);
    LuminanceFrame out = capture(cam, scene, rng);
    for (std::size_t i = 0; i < scene.samples.size(); ++i)
        CHECK(out.samples[i] == scene.samples[i]);
}

TEST_CASE("noise-free flat capture is the closed form scene*(1+K)") {
    SensorModel cam = make_camera("cf", 32, 32, 0.02, 0.0, 6);
    LuminanceFrame scene = testutil::constant_frame(32, 32, 100.0);
    prnu::GaussianStream rng(0);
    LuminanceFrame out = capture(cam, scene, rng);
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const double expect =
            std::clamp(100.0 + 100.0 * cam.k[i], 0.0, 255.0);
        CHECK(out.samples[i] == expect);
    }
}

TEST_CASE("the pattern is recoverable exactly from noise-free flat captures") {
    SensorModel cam = make_camera("rec", 24, 24, 0.02, 0.0, 7);
    LuminanceFrame scene = testutil::constant_frame(24, 24, 128.0);
    prnu::GaussianStream rng(0);
    LuminanceFrame shot = capture(cam, scene, rng);
    for (std::size_t i = 0; i < shot.samples.size(); ++i) {
        const double recovered = (shot.samples[i] - 128.0) / 128.0;
        // Exact up to the one rounding the capture sum scene + scene*k
        // performs (about one ulp at luminance scale).
        CHECK(std::abs(recovered - cam.k[i]) < 5e-16);
    }
}

TEST_CASE("averaging 200 noisy flat captures recovers the pattern") {
    SensorModel cam = make_camera("avg", 32, 32, 0.02, 2.0, 8);
    LuminanceFrame scene = testutil::constant_frame(32, 32, 128.0);
    prnu::GaussianStream rng(prnu::derive_seed(8, "avg-noise", 0));

    std::vector<double> acc(32 * 32, 0.0);
    const int n = 200;
    for (int i = 0; i < n; ++i) {
        LuminanceFrame shot = capture(cam, scene, rng);
        for (std::size_t p = 0; p < acc.size(); ++p)
            acc[p] += (shot.samples[p] - 128.0) / 128.0 / n;
    }
    CHECK(testutil::correlation_of(acc, cam.k) > 0.9);
}

TEST_CASE("capture rejects mismatched scenes and rounds when asked") {
    SensorModel cam = make_camera("q", 8, 8, 0.02, 0.0, 9);
    prnu::GaussianStream rng(0);
    LuminanceFrame wrong(9, 8, 100.0);
    CHECK_THROWS_AS(capture(cam, wrong, rng), prnu::DimensionMismatch);

    LuminanceFrame scene = testutil::constant_frame(8, 8, 100.5);
    CaptureOptions opts;
    opts.quantize = true;
    LuminanceFrame out = capture(cam, scene, rng, opts);
    for (double v : out.samples) {
        CHECK(v == std::floor(v));
        CHECK(v >= 0.0);
        CHECK(v <= 255.0);
    }
}

TEST_CASE("flat scenes are constant") {
    SceneSpec spec;
    spec.kind = SceneKind::Flat;
    spec.level = 128.0;
    LuminanceFrame scene = generate_scene(spec, 4, 4);
    REQUIRE(scene.samples.size() == 16);
    for (double v : scene.samples)
        CHECK(v == 128.0);
}

TEST_CASE("ramps hit the range endpoints exactly") {
    SceneSpec spec;
    spec.kind = SceneKind::Ramp;
    spec.range_lo = 16.0;
    spec.range_hi = 240.0;
    LuminanceFrame scene = generate_scene(spec, 225, 3);
    CHECK(scene.at(0, 0) == 16.0);
    CHECK(scene.at(0, 224) == 240.0);
    CHECK(scene.at(2, 0) == 16.0);
    // Strictly increasing left to right.
    for (int c = 1; c < 225; ++c)
        CHECK(scene.at(1, c) > scene.at(1, c - 1));
}

TEST_CASE("smooth random scenes are deterministic and bounded") {
    SceneSpec spec;
    spec.kind = SceneKind::SmoothRandom;
    spec.cutoff = 0.1;
    spec.seed = 7;
    LuminanceFrame a = generate_scene(spec, 64, 48);
    LuminanceFrame b = generate_scene(spec, 64, 48);
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        CHECK(a.samples[i] == b.samples[i]);

    double lo = 1e9, hi = -1e9;
    for (double v : a.samples) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo >= 16.0);
    CHECK(hi <= 240.0);
    // The generator rescales onto the declared range ends.
    CHECK(lo == doctest::Approx(16.0));
    CHECK(hi == doctest::Approx(240.0));

    SceneSpec other = spec;
    other.seed = 8;
    LuminanceFrame c = generate_scene(other, 64, 48);
    CHECK(std::abs(testutil::correlation_of(a.samples, c.samples)) < 0.5);
}

TEST_CASE("scene specs validate their ranges") {
    SceneSpec spec;
    spec.kind = SceneKind::Flat;
    spec.level = 300.0;
    CHECK_THROWS_AS(spec.validate(), prnu::Error);

    spec = SceneSpec{};
    spec.range_lo = 200.0;
    spec.range_hi = 100.0;
    CHECK_THROWS_AS(spec.validate(), prnu::Error);

    spec = SceneSpec{};
    spec.kind = SceneKind::SmoothRandom;
    spec.cutoff = 0.0;
    CHECK_THROWS_AS(spec.validate(), prnu::Error);
}

TEST_CASE("registration and query captures differ in scenes and noise") {
    SensorModel cam = make_camera("roles", 32, 32, 0.02, 2.0, 11);
    LuminanceFrame reg = capture_for_frame(cam, "registration", 0, 0.1, false);
    LuminanceFrame query = capture_for_frame(cam, "query", 0, 0.1, false);
    // Same camera, disjoint role streams: frames must not coincide.
    double diff = 0.0;
    for (std::size_t i = 0; i < reg.samples.size(); ++i)
        diff = std::max(diff, std::abs(reg.samples[i] - query.samples[i]));
    CHECK(diff > 1.0);

    // Same role and index is reproducible.
    LuminanceFrame again = capture_for_frame(cam, "registration", 0, 0.1, false);
    for (std::size_t i = 0; i < reg.samples.size(); ++i)
        CHECK(again.samples[i] == reg.samples[i]);
}

namespace {

std::map<std::filesystem::path, std::string> snapshot_tree(const std::filesystem::path& root) {
    std::map<std::filesystem::path, std::string> bytes;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
        if (entry.is_regular_file())
            bytes[std::filesystem::relative(entry.path(), root)] =
                testutil::slurp(entry.path());
    return bytes;
}

}  // namespace

TEST_CASE("datasets render one registration and one query sequence per camera") {
    testutil::TempDir dir("prnu_ds");
    std::vector<SensorModel> cams;
    for (int i = 0; i < 3; ++i)
        cams.push_back(make_camera("cam" + std::to_string(i), 16, 16, 0.02, 2.0,
                                   100 + static_cast<std::uint64_t>(i)));
    SequenceParams params;
    params.reg_frames = 4;
    params.query_frames = 3;

    SUBCASE("y4m layout") {
        DatasetManifest manifest =
            render_dataset(cams, params, DatasetFormat::Y4m, dir.path());
        REQUIRE(manifest.cameras.size() == 3);
        for (const auto& cam : manifest.cameras) {
            FrameSequence reg = prnu::load_frames_path(cam.registration_path);
            FrameSequence query = prnu::load_frames_path(cam.query_path);
            CHECK(reg.size() == 4);
            CHECK(query.size() == 3);
            CHECK(reg.width() == 16);
            // Registration footage declares one frame per second so the
            // per-second selection rule keeps every frame.
            CHECK(reg.declared_fps == 1.0);
        }

        DatasetManifest reread =
            DatasetManifest::from_json_file(dir / "manifest.json");
        REQUIRE(reread.cameras.size() == 3);
        CHECK(reread.cameras[0].camera_id == "cam0");
        CHECK(reread.cameras[0].seed == 100);

        // Regeneration into the same directory is byte-identical.
        auto before = snapshot_tree(dir.path());
        render_dataset(cams, params, DatasetFormat::Y4m, dir.path());
        auto after = snapshot_tree(dir.path());
        CHECK(before == after);
    }

    SUBCASE("pgm layout marks registration frames as I") {
        DatasetManifest manifest =
            render_dataset(cams, params, DatasetFormat::Pgm, dir.path());
        REQUIRE(manifest.cameras.size() == 3);
        const auto& cam0 = manifest.cameras[0];
        CHECK(std::filesystem::is_directory(cam0.registration_path));
        CHECK(std::filesystem::exists(std::filesystem::path(cam0.registration_path) /
                                      prnu::kFrameKindSidecar));

        FrameSequence reg = prnu::load_frames_path(cam0.registration_path);
        REQUIRE(reg.size() == 4);
        for (const auto& f : reg.frames)
            CHECK(f.kind == prnu::FrameKind::I);

        FrameSequence query = prnu::load_frames_path(cam0.query_path);
        for (const auto& f : query.frames)
            CHECK(f.kind == prnu::FrameKind::Unknown);
    }
}

TEST_CASE("single camera with single frames renders two one-frame sequences") {
    testutil::TempDir dir("prnu_ds1");
    std::vector<SensorModel> cams = {make_camera("solo", 16, 16, 0.02, 2.0, 55)};
    SequenceParams params;
    params.reg_frames = 1;
    params.query_frames = 1;
    DatasetManifest manifest =
        render_dataset(cams, params, DatasetFormat::Y4m, dir.path());
    REQUIRE(manifest.cameras.size() == 1);
    CHECK(prnu::load_frames_path(manifest.cameras[0].registration_path).size() == 1);
    CHECK(prnu::load_frames_path(manifest.cameras[0].query_path).size() == 1);
}
