#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pfs/adversary.hpp"
#include "pfs/harness.hpp"
#include "pfs/protocol.hpp"

namespace pfs {

// All on-disk formats are line-oriented text: a "<kind> v<version>" header, a body and
// an "end <n>" trailer counting body lines, so truncation is always detected.
// Parse failures carry distinct codes: version_mismatch, malformed_hex, truncated, parse.

inline constexpr int kTranscriptFormatVersion = 1;
inline constexpr int kKeyFormatVersion = 1;
inline constexpr int kCardFormatVersion = 1;
inline constexpr int kTapsFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

/// Header "pfs-transcript v1 curve=<name>", then one line per wire event:
///   <session_id> <C→S|S→C> <message_name> <hex_payload> <timestamp_ms>
std::string format_transcript(const Transcript& transcript);
Transcript parse_transcript(std::string_view text);

/// Key file: curve, s, pub. Kept apart from transcripts.
std::string format_key(const ServerKey& key);
ServerKey parse_key(std::string_view text);

/// Card file: curve, H, E, Z, Pub.
std::string format_card(const SmartCard& card);
SmartCard parse_card(std::string_view text);

/// Test-only taps of one session, as written by `handshake --taps`.
struct TapsFile {
    std::string session_id;
    std::string curve;
    std::string outcome;
    SessionTaps taps;
};

/// Throws Error(invalid_input) if the record was produced without taps.
std::string format_taps(const SessionRecord& record);
TapsFile parse_taps(std::string_view text);

/// JSON mirror of RecoveredSession (hex fields, step list). Keys are emitted in a fixed
/// order, so identical sessions give identical bytes.
std::string format_report(const RecoveredSession& recovered);
RecoveredSession parse_report(std::string_view text);

/// Human-readable six-step trace.
std::string render_trace(const RecoveredSession& recovered);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace pfs
