#include "prnu/frame_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "prnu/error.hpp"

namespace prnu {

namespace {

// Reads exactly n bytes; on a short read throws with the stream offset at
// which the data ran out.
void read_exact(std::istream& in, char* buf, std::size_t n, std::uint64_t& offset,
                const std::string& what) {
    in.read(buf, static_cast<std::streamsize>(n));
    const std::uint64_t got = static_cast<std::uint64_t>(in.gcount());
    offset += got;
    if (got != n) throw ParseError(what + " truncated", offset);
}

// Reads bytes up to and including LF; returns the line without it.
std::string read_line(std::istream& in, std::uint64_t& offset, const std::string& what) {
    std::string line;
    char ch;
    while (in.get(ch)) {
        ++offset;
        if (ch == '\n') return line;
        line.push_back(ch);
    }
    throw ParseError(what + " truncated", offset);
}

std::vector<std::string> split_fields(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

long parse_long(const std::string& s, const std::string& what, std::uint64_t offset) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad " + what + " value '" + s + "'", offset);
    }
}

struct ChromaLayout {
    std::size_t plane_bytes(int w, int h) const {
        const std::size_t cw = (static_cast<std::size_t>(w) + sub_x - 1) / sub_x;
        const std::size_t ch = (static_cast<std::size_t>(h) + sub_y - 1) / sub_y;
        return planes * cw * ch;
    }
    int planes = 2;
    int sub_x = 1;
    int sub_y = 1;
};

ChromaLayout chroma_layout(const std::string& tag, std::uint64_t offset) {
    if (tag == "mono") return {0, 1, 1};
    if (tag.rfind("420", 0) == 0) return {2, 2, 2};  // 420, 420jpeg, 420mpeg2, ...
    if (tag == "422") return {2, 2, 1};
    if (tag == "444") return {2, 1, 1};
    throw ParseError("unsupported chroma tag C" + tag, offset);
}

unsigned char to_byte(double v) {
    const double c = std::clamp(v, 0.0, 255.0);
    return static_cast<unsigned char>(std::lround(c));
}

std::string fps_token(double fps) {
    const double r = std::round(fps);
    if (std::fabs(fps - r) < 1e-9 && r >= 1.0)
        return std::to_string(static_cast<long>(r)) + ":1";
    return std::to_string(static_cast<long>(std::lround(fps * 1000.0))) + ":1000";
}

}  // namespace

FrameSequence parse_y4m(std::istream& stream, const std::string& source_id) {
    std::uint64_t offset = 0;

    char sig[9];
    read_exact(stream, sig, sizeof(sig), offset, "stream signature");
    if (std::string(sig, sizeof(sig)) != "YUV4MPEG2")
        throw ParseError("not a YUV4MPEG2 stream", 0);

    const std::string header = read_line(stream, offset, "stream header");
    int width = -1, height = -1;
    std::optional<double> fps;
    std::string chroma = "420";  // format default when C is absent

    for (const std::string& tok : split_fields(header)) {
        switch (tok[0]) {
            case 'W':
                width = static_cast<int>(parse_long(tok.substr(1), "width", offset));
                break;
            case 'H':
                height = static_cast<int>(parse_long(tok.substr(1), "height", offset));
                break;
            case 'F': {
                const auto colon = tok.find(':');
                if (colon == std::string::npos || colon == 1 || colon + 1 >= tok.size())
                    throw ParseError("bad frame-rate token '" + tok + "'", offset);
                const long num = parse_long(tok.substr(1, colon - 1), "fps numerator", offset);
                const long den = parse_long(tok.substr(colon + 1), "fps denominator", offset);
                if (num > 0 && den > 0)
                    fps = static_cast<double>(num) / static_cast<double>(den);
                break;
            }
            case 'C':
                chroma = tok.substr(1);
                break;
            case 'I':
            case 'A':
            case 'X':
                break;  // interlacing, aspect, comments: irrelevant to Y extraction
            default:
                throw ParseError("unknown header token '" + tok + "'", offset);
        }
    }
    if (width <= 0 || height <= 0)
        throw ParseError("missing or non-positive W/H in header", offset);

    const ChromaLayout layout = chroma_layout(chroma, offset);
    const std::size_t y_bytes = static_cast<std::size_t>(width) * height;
    const std::size_t c_bytes = layout.plane_bytes(width, height);

    FrameSequence seq;
    seq.source_id = source_id;
    seq.declared_fps = fps;

    std::vector<char> ybuf(y_bytes);
    std::vector<char> cbuf(c_bytes);
    std::int64_t index = 0;

    for (;;) {
        char f0;
        if (!stream.get(f0)) break;  // clean EOF between frames
        ++offset;
        char frame_rest[4];
        read_exact(stream, frame_rest, sizeof(frame_rest), offset, "frame marker");
        if (f0 != 'F' || std::string(frame_rest, 4) != "RAME")
            throw ParseError("expected FRAME marker", offset - 5);
        // Optional frame parameters up to LF.
        read_line(stream, offset, "frame header");

        read_exact(stream, ybuf.data(), y_bytes, offset, "frame payload");
        if (c_bytes > 0) read_exact(stream, cbuf.data(), c_bytes, offset, "frame payload");

        LuminanceFrame frame;
        frame.width = width;
        frame.height = height;
        frame.frame_index = index++;
        frame.kind = FrameKind::Unknown;
        frame.samples.resize(y_bytes);
        for (std::size_t i = 0; i < y_bytes; ++i)
            frame.samples[i] = static_cast<double>(static_cast<unsigned char>(ybuf[i]));
        seq.frames.push_back(std::move(frame));
    }

    seq.validate();
    return seq;
}

FrameSequence parse_y4m_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return parse_y4m(in, path.filename().string());
}

void write_y4m(std::ostream& stream, const FrameSequence& seq,
               std::optional<double> fps_override) {
    seq.validate();
    const double fps = fps_override.value_or(seq.declared_fps.value_or(30.0));
    const LuminanceFrame& first = seq.frames.front();
    stream << "YUV4MPEG2 W" << first.width << " H" << first.height << " F"
           << fps_token(fps) << " Ip A1:1 Cmono\n";
    std::vector<char> buf(first.samples.size());
    for (const LuminanceFrame& frame : seq.frames) {
        stream << "FRAME\n";
        for (std::size_t i = 0; i < frame.samples.size(); ++i)
            buf[i] = static_cast<char>(to_byte(frame.samples[i]));
        stream.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    if (!stream) throw Error("y4m write failed");
}

void write_y4m_file(const std::filesystem::path& path, const FrameSequence& seq,
                    std::optional<double> fps_override) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_y4m(out, seq, fps_override);
}

LuminanceFrame read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());

    std::string magic;
    long width = 0, height = 0, maxval = 0;
    in >> magic >> width >> height >> maxval;
    if (!in || magic != "P5")
        throw ParseError(path.string() + " is not a binary PGM (P5) file");
    if (width <= 0 || height <= 0)
        throw ParseError(path.string() + " has non-positive dimensions");
    if (maxval != 255)
        throw ParseError(path.string() + " has unsupported maxval " +
                         std::to_string(maxval));
    in.get();  // single whitespace byte after maxval

    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<char> buf(n);
    in.read(buf.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw ParseError(path.string() + " pixel data truncated",
                         static_cast<std::uint64_t>(in.gcount()));

    LuminanceFrame frame;
    frame.width = static_cast<int>(width);
    frame.height = static_cast<int>(height);
    frame.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        frame.samples[i] = static_cast<double>(static_cast<unsigned char>(buf[i]));
    return frame;
}

void write_pgm(const std::filesystem::path& path, const LuminanceFrame& frame) {
    frame.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    std::vector<char> buf(frame.samples.size());
    for (std::size_t i = 0; i < frame.samples.size(); ++i)
        buf[i] = static_cast<char>(to_byte(frame.samples[i]));
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("pgm write failed for " + path.string());
}

FrameSequence load_frame_dir(const std::filesystem::path& dir,
                             const std::optional<std::filesystem::path>& manifest) {
    if (!std::filesystem::is_directory(dir))
        throw Error(dir.string() + " is not a directory");

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) {
                  return a.filename().string() < b.filename().string();
              });
    if (files.empty()) throw Error("no .pgm frames in " + dir.string());

    std::map<std::string, FrameKind> kinds;
    if (manifest) {
        std::ifstream in(*manifest);
        if (!in) throw Error("cannot open manifest " + manifest->string());
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream fields(line);
            std::string name, kind;
            if (!(fields >> name >> kind))
                throw ParseError("bad manifest line '" + line + "'");
            kinds[name] = frame_kind_from_string(kind);
        }
        for (const auto& [name, kind] : kinds) {
            const bool present = std::any_of(
                files.begin(), files.end(),
                [&](const auto& p) { return p.filename().string() == name; });
            if (!present)
                throw Error("manifest names missing frame file " + name);
        }
    }

    FrameSequence seq;
    seq.source_id = dir.string();
    std::int64_t index = 0;
    for (const auto& path : files) {
        LuminanceFrame frame = read_pgm(path);
        if (!seq.frames.empty() && (frame.width != seq.frames.front().width ||
                                    frame.height != seq.frames.front().height))
            throw DimensionMismatch("mixed frame dimensions in " + dir.string() + ": " +
                                    path.filename().string());
        frame.frame_index = index++;
        const auto it = kinds.find(path.filename().string());
        frame.kind = it == kinds.end() ? FrameKind::Unknown : it->second;
        seq.frames.push_back(std::move(frame));
    }
    seq.validate();
    return seq;
}

FrameSequence load_frames_path(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) {
        const std::filesystem::path sidecar = path / kFrameKindSidecar;
        if (std::filesystem::exists(sidecar)) return load_frame_dir(path, sidecar);
        return load_frame_dir(path);
    }
    return parse_y4m_file(path);
}

FrameSequence select_registration_frames(const FrameSequence& seq, std::size_t count) {
    seq.validate();
    if (count < 1) throw Error("selection count must be >= 1");

    FrameSequence out;
    out.source_id = seq.source_id;
    out.declared_fps = seq.declared_fps;

    std::vector<const LuminanceFrame*> iframes;
    for (const LuminanceFrame& f : seq.frames)
        if (f.kind == FrameKind::I) iframes.push_back(&f);

    if (!iframes.empty()) {
        for (const LuminanceFrame* f : iframes) {
            if (out.frames.size() == count) break;
            out.frames.push_back(*f);
        }
    } else {
        const double fps = seq.declared_fps.value_or(30.0);
        const std::size_t stride =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(fps)));
        for (std::size_t i = 0; i < seq.frames.size() && out.frames.size() < count;
             i += stride)
            out.frames.push_back(seq.frames[i]);
    }
    out.short_supply = out.frames.size() < count;
    out.validate();
    return out;
}

FrameSequence select_query_frames(const FrameSequence& seq, std::size_t count) {
    seq.validate();
    if (count < 1) throw Error("selection count must be >= 1");

    FrameSequence out;
    out.source_id = seq.source_id;
    out.declared_fps = seq.declared_fps;
    for (const LuminanceFrame& f : seq.frames) {
        if (out.frames.size() == count) break;
        out.frames.push_back(f);
    }
    out.short_supply = out.frames.size() < count;
    out.validate();
    return out;
}

}  // namespace prnu
