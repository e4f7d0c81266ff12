#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "prnu/frame.hpp"

namespace prnu {

// --- YUV4MPEG2 ---------------------------------------------------------
//
// Header: "YUV4MPEG2" + space-separated tokens (W, H, F, I, A, C, X...),
// LF-terminated. Each frame: "FRAME" + optional params + LF + planar
// payload. Only the Y plane is kept; chroma is read and discarded.

FrameSequence parse_y4m(std::istream& stream, const std::string& source_id = "y4m");
FrameSequence parse_y4m_file(const std::filesystem::path& path);

// Writes a Cmono stream. Samples are clamped to [0,255] and rounded to
// the nearest byte. fps controls the F tag (default F30:1).
void write_y4m(std::ostream& stream, const FrameSequence& seq,
               std::optional<double> fps_override = std::nullopt);
void write_y4m_file(const std::filesystem::path& path, const FrameSequence& seq,
                    std::optional<double> fps_override = std::nullopt);

// --- PGM (P5, maxval 255) ----------------------------------------------

LuminanceFrame read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const LuminanceFrame& frame);

// Loads every *.pgm in `dir`, sorted by filename (ascending, bytewise).
// The optional manifest has one "<filename> <I|P|B>" line per annotated
// frame; unlisted frames stay Unknown. Throws on mixed dimensions or a
// manifest entry naming a missing file.
FrameSequence load_frame_dir(const std::filesystem::path& dir,
                             const std::optional<std::filesystem::path>& manifest = std::nullopt);

// Frame-kind sidecar filename the PGM writers and readers agree on.
inline constexpr const char* kFrameKindSidecar = "kinds.txt";

// Loads a Y4M file, or a PGM directory (using its kind sidecar when one
// is present). Dispatches on whether `path` is a directory.
FrameSequence load_frames_path(const std::filesystem::path& path);

// --- Selection ----------------------------------------------------------

// Registration subset: the first `count` I-flagged frames when any exist;
// otherwise one frame per second of footage (stride = round(fps), default
// 30). Fewer available than requested sets short_supply.
FrameSequence select_registration_frames(const FrameSequence& seq, std::size_t count);

// Query subset: the first `count` frames regardless of kind.
FrameSequence select_query_frames(const FrameSequence& seq, std::size_t count);

}  // namespace prnu
