#include "prnu/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>

#include "prnu/crc64.hpp"
#include "prnu/error.hpp"
#include "prnu/kernels.hpp"
#include "prnu/parallel.hpp"

namespace prnu {

namespace {

std::int64_t now_unix_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void append_le32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_le64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t read_le32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t read_le64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

constexpr char kMagic[8] = {'P', 'R', 'N', 'U', 'F', 'P', '1', '\0'};

}  // namespace

void Fingerprint::validate() const {
    if (width <= 0 || height <= 0) throw Error("fingerprint dimensions must be positive");
    if (values.size() != static_cast<std::size_t>(width) * height)
        throw Error("fingerprint sample count does not match dimensions");
    for (double v : values)
        if (!std::isfinite(v)) throw Error("fingerprint contains non-finite values");
}

Residual compute_residual(const LuminanceFrame& frame, const DenoiserConfig& cfg) {
    const LuminanceFrame denoised = denoise_frame(frame, cfg);
    Residual r;
    r.width = frame.width;
    r.height = frame.height;
    r.values.resize(frame.samples.size());
    kernels::active().subtract(r.values.data(), frame.samples.data(),
                               denoised.samples.data(), r.values.size());
    return r;
}

void FingerprintAccumulator::add(const Residual& r) {
    if (weighted_mode_) throw Error("accumulator already in weighted mode");
    if (count_ == 0) {
        width_ = r.width;
        height_ = r.height;
        sum_.assign(r.values.size(), 0.0);
    } else if (r.width != width_ || r.height != height_) {
        throw DimensionMismatch("residual " + std::to_string(r.width) + "x" +
                                std::to_string(r.height) + " does not match accumulator " +
                                std::to_string(width_) + "x" + std::to_string(height_));
    }
    kernels::active().axpy(sum_.data(), r.values.data(), 1.0, sum_.size());
    ++count_;
}

void FingerprintAccumulator::add_weighted(const Residual& r, const LuminanceFrame& frame) {
    if (count_ == 0) {
        width_ = r.width;
        height_ = r.height;
        sum_.assign(r.values.size(), 0.0);
        weight_.assign(r.values.size(), 0.0);
        weighted_mode_ = true;
    } else if (!weighted_mode_) {
        throw Error("accumulator already in plain mode");
    } else if (r.width != width_ || r.height != height_) {
        throw DimensionMismatch("residual dimensions do not match accumulator");
    }
    if (frame.width != r.width || frame.height != r.height)
        throw DimensionMismatch("frame dimensions do not match its residual");
    const std::size_t n = sum_.size();
    for (std::size_t i = 0; i < n; ++i) {
        sum_[i] += r.values[i] * frame.samples[i];
        weight_[i] += frame.samples[i] * frame.samples[i];
    }
    ++count_;
}

Fingerprint FingerprintAccumulator::average(bool postprocess) const {
    if (count_ == 0) throw Error("no residuals accumulated");
    if (weighted_mode_) throw Error("accumulator holds weighted sums; use weighted()");
    Fingerprint fp;
    fp.width = width_;
    fp.height = height_;
    fp.values = sum_;
    kernels::active().scale(fp.values.data(), 1.0 / static_cast<double>(count_),
                            fp.values.size());
    fp.frames_used = static_cast<std::uint32_t>(count_);
    fp.created_at = now_unix_seconds();
    if (postprocess) {
        zero_mean_rows_cols(fp.values, fp.width, fp.height);
        fp.postprocessed = true;
    }
    return fp;
}

Fingerprint FingerprintAccumulator::weighted(bool postprocess) const {
    if (count_ == 0) throw Error("no residuals accumulated");
    if (!weighted_mode_) throw Error("accumulator holds plain sums; use average()");
    Fingerprint fp;
    fp.width = width_;
    fp.height = height_;
    fp.values.resize(sum_.size());
    for (std::size_t i = 0; i < sum_.size(); ++i)
        fp.values[i] = weight_[i] > 0.0 ? sum_[i] / weight_[i] : 0.0;
    fp.frames_used = static_cast<std::uint32_t>(count_);
    fp.created_at = now_unix_seconds();
    if (postprocess) {
        zero_mean_rows_cols(fp.values, fp.width, fp.height);
        fp.postprocessed = true;
    }
    return fp;
}

Fingerprint estimate_fingerprint(const FrameSequence& seq, const DenoiserConfig& cfg,
                                 const EstimatorOptions& opts) {
    seq.validate();
    cfg.validate();

    FingerprintAccumulator acc;
    const unsigned threads = std::max(1u, opts.threads);
    if (opts.ml_weighting) {
        ordered_parallel_for<Residual>(
            seq.frames.size(), threads,
            [&](std::size_t i) { return compute_residual(seq.frames[i], cfg); },
            [&](std::size_t i, Residual r) { acc.add_weighted(r, seq.frames[i]); });
        Fingerprint fp = acc.weighted(opts.postprocess);
        fp.source_label = seq.source_id;
        return fp;
    }
    ordered_parallel_for<Residual>(
        seq.frames.size(), threads,
        [&](std::size_t i) { return compute_residual(seq.frames[i], cfg); },
        [&](std::size_t, Residual r) { acc.add(r); });
    Fingerprint fp = acc.average(opts.postprocess);
    fp.source_label = seq.source_id;
    return fp;
}

void zero_mean_rows_cols(std::vector<double>& values, int width, int height) {
    if (width <= 0 || height <= 0 ||
        values.size() != static_cast<std::size_t>(width) * height)
        throw Error("zero_mean_rows_cols: bad dimensions");
    const auto& k = kernels::active();
    for (int r = 0; r < height; ++r) {
        double* row = values.data() + static_cast<std::size_t>(r) * width;
        const double m = k.sum(row, width) / width;
        for (int c = 0; c < width; ++c) row[c] -= m;
    }
    std::vector<double> colsum(width, 0.0);
    for (int r = 0; r < height; ++r)
        k.axpy(colsum.data(), values.data() + static_cast<std::size_t>(r) * width, 1.0,
               width);
    k.scale(colsum.data(), 1.0 / height, width);
    for (int r = 0; r < height; ++r)
        k.axpy(values.data() + static_cast<std::size_t>(r) * width, colsum.data(), -1.0,
               width);
}

FingerprintQuality fingerprint_quality(const Fingerprint& fp) {
    fp.validate();
    const auto& k = kernels::active();
    const std::size_t n = fp.values.size();
    FingerprintQuality q;
    q.mean = k.sum(fp.values.data(), n) / static_cast<double>(n);
    q.variance = k.sumsq(fp.values.data(), n) / static_cast<double>(n) - q.mean * q.mean;
    if (q.variance < 0.0) q.variance = 0.0;
    const auto [mn, mx] = std::minmax_element(fp.values.begin(), fp.values.end());
    q.min = *mn;
    q.max = *mx;
    return q;
}

void save_fingerprint(const Fingerprint& fp, const std::filesystem::path& path) {
    fp.validate();

    std::string buf;
    buf.reserve(20 + fp.values.size() * 4 + 8);
    buf.append(kMagic, sizeof(kMagic));
    append_le32(buf, static_cast<std::uint32_t>(fp.width));
    append_le32(buf, static_cast<std::uint32_t>(fp.height));
    append_le32(buf, fp.frames_used);
    buf.push_back(fp.postprocessed ? '\x01' : '\x00');
    buf.append(3, '\x00');
    for (double v : fp.values) {
        const float f = static_cast<float>(v);
        const std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
        append_le32(buf, bits);
    }
    const std::uint64_t crc =
        crc64(reinterpret_cast<const unsigned char*>(buf.data()), buf.size());
    append_le64(buf, crc);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot open " + path.string() + " for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw StoreError("write failed for " + path.string());
}

Fingerprint load_fingerprint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    // magic(8) + width(4) + height(4) + frames(4) + flag(1) + reserved(3)
    constexpr std::size_t kHeader = 24;
    if (buf.size() < kHeader + 8)
        throw ParseError("fingerprint file truncated", buf.size());
    if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw ParseError("bad fingerprint magic", 0);

    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
    Fingerprint fp;
    fp.width = static_cast<int>(read_le32(p + 8));
    fp.height = static_cast<int>(read_le32(p + 12));
    fp.frames_used = read_le32(p + 16);
    fp.postprocessed = p[20] != 0;

    if (fp.width <= 0 || fp.height <= 0 || fp.width > 1 << 20 || fp.height > 1 << 20)
        throw ParseError("implausible fingerprint dimensions", 8);
    const std::size_t n = static_cast<std::size_t>(fp.width) * fp.height;
    const std::size_t payload_end = kHeader + n * 4;
    if (buf.size() != payload_end + 8)
        throw ParseError("fingerprint size does not match header", buf.size());

    const std::uint64_t stored_crc = read_le64(p + payload_end);
    const std::uint64_t actual_crc = crc64(p, payload_end);
    if (stored_crc != actual_crc)
        throw StoreError("fingerprint checksum mismatch in " + path.string());

    fp.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t bits = read_le32(p + kHeader + i * 4);
        fp.values[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    return fp;
}

void quantize_to_storage(Fingerprint& fp) {
    for (double& v : fp.values) v = static_cast<double>(static_cast<float>(v));
}

}  // namespace prnu
