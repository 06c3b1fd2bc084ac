#include "pfs/files.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "pfs/error.hpp"

namespace pfs {

namespace {

using Json = nlohmann::json;

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        if (nl == std::string_view::npos) {
            lines.push_back(text);
            break;
        }
        lines.push_back(text.substr(0, nl));
        text.remove_prefix(nl + 1);
    }
    return lines;
}

std::vector<std::string_view> split_words(std::string_view line) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) words.push_back(line.substr(start, i - start));
    }
    return words;
}

std::uint64_t parse_u64(std::string_view word, const std::string& where) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
    if (ec != std::errc() || ptr != word.data() + word.size()) {
        throw Error(Errc::parse, where + ": expected an unsigned integer, got '" + std::string(word) + "'");
    }
    return value;
}

std::string at_line(std::size_t index) { return "line " + std::to_string(index + 1); }

/// Re-throws a nested error with the line number prefixed, keeping the code.
template <typename F>
auto on_line(std::size_t index, F&& f) {
    try {
        return f();
    } catch (const Error& err) {
        throw Error(err.code(), at_line(index) + ": " + err.what());
    }
}

/// Header + body + "end <n>" trailer. Returns the body lines and the header words.
struct Framed {
    std::vector<std::string_view> header;
    std::vector<std::string_view> body;
    std::size_t body_offset = 1;
};

Framed unframe(std::string_view text, std::string_view kind, int version) {
    auto lines = split_lines(text);
    if (lines.empty()) {
        throw Error(Errc::truncated, std::string(kind) + ": empty file");
    }
    Framed out;
    out.header = split_words(lines.front());
    if (out.header.size() < 2 || out.header[0] != kind) {
        throw Error(Errc::parse, at_line(0) + ": expected a '" + std::string(kind) + "' header");
    }
    const std::string expected = "v" + std::to_string(version);
    if (out.header[1] != expected) {
        throw Error(Errc::version_mismatch, at_line(0) + ": " + std::string(kind) + " version " +
                                                std::string(out.header[1]) + " is not supported (want " + expected +
                                                ")");
    }
    std::size_t last = lines.size();
    while (last > 1 && split_words(lines[last - 1]).empty()) --last;
    const auto trailer = last > 1 ? split_words(lines[last - 1]) : std::vector<std::string_view>{};
    if (trailer.size() != 2 || trailer[0] != "end") {
        throw Error(Errc::truncated, std::string(kind) + ": missing 'end' trailer after " + at_line(last - 1));
    }
    const auto count = on_line(last - 1, [&] { return parse_u64(trailer[1], "trailer"); });
    out.body.assign(lines.begin() + 1, lines.begin() + static_cast<std::ptrdiff_t>(last - 1));
    if (out.body.size() != count) {
        throw Error(Errc::truncated, std::string(kind) + ": trailer announces " + std::to_string(count) +
                                         " lines, found " + std::to_string(out.body.size()));
    }
    return out;
}

std::string frame(std::string_view kind, int version, std::string_view header_extra,
                  const std::vector<std::string>& body) {
    std::ostringstream out;
    out << kind << " v" << version;
    if (!header_extra.empty()) out << ' ' << header_extra;
    out << '\n';
    for (const auto& line : body) out << line << '\n';
    out << "end " << body.size() << '\n';
    return out.str();
}

std::string header_value(const Framed& f, std::string_view key) {
    const std::string prefix = std::string(key) + "=";
    for (std::size_t i = 2; i < f.header.size(); ++i) {
        if (f.header[i].substr(0, prefix.size()) == prefix) return std::string(f.header[i].substr(prefix.size()));
    }
    throw Error(Errc::parse, at_line(0) + ": header lacks " + std::string(key) + "=");
}

/// key=value body; duplicate or malformed lines are parse errors.
class Fields {
public:
    Fields(const Framed& f, std::string_view kind) : kind_(kind) {
        for (std::size_t i = 0; i < f.body.size(); ++i) {
            const auto line = f.body[i];
            const auto eq = line.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                throw Error(Errc::parse, at_line(i + f.body_offset) + ": expected field=value");
            }
            const std::string key(line.substr(0, eq));
            if (!values_.emplace(key, Entry{std::string(line.substr(eq + 1)), i + f.body_offset}).second) {
                throw Error(Errc::parse, at_line(i + f.body_offset) + ": duplicate field " + key);
            }
        }
    }

    const CurveParams& curve() const {
        const Entry& e = entry("curve");
        try {
            return curve_by_name(e.value);
        } catch (const Error& err) {
            throw Error(err.code(), at_line(e.line) + ": " + err.what());
        }
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    const std::string& text(const std::string& key) const { return entry(key).value; }

    template <typename F>
    auto parse(const std::string& key, F&& f) const {
        const Entry& e = entry(key);
        return on_line(e.line, [&] { return f(e.value); });
    }

    Block32 block(const std::string& key) const {
        return parse(key, [](const std::string& v) { return Block32::from_hex(v); });
    }

    std::optional<Block32> optional_block(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return block(key);
    }

private:
    struct Entry {
        std::string value;
        std::size_t line;
    };

    const Entry& entry(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) {
            throw Error(Errc::parse, std::string(kind_) + ": missing field " + key);
        }
        return it->second;
    }

    std::string_view kind_;
    std::map<std::string, Entry> values_;
};

Direction parse_direction(std::string_view word) {
    if (word == to_string(Direction::client_to_server)) return Direction::client_to_server;
    if (word == to_string(Direction::server_to_client)) return Direction::server_to_client;
    throw Error(Errc::parse, "unknown direction '" + std::string(word) + "'");
}

std::pair<MessageKind, Stage> parse_message_name(std::string_view word) {
    const auto dot = word.find('.');
    if (dot == std::string_view::npos) {
        throw Error(Errc::parse, "message name '" + std::string(word) + "' lacks a stage");
    }
    const auto kind_part = word.substr(0, dot);
    const auto stage_part = word.substr(dot + 1);
    MessageKind kind;
    if (kind_part == to_string(MessageKind::login_request)) {
        kind = MessageKind::login_request;
    } else if (kind_part == to_string(MessageKind::login_response)) {
        kind = MessageKind::login_response;
    } else {
        throw Error(Errc::parse, "unknown message '" + std::string(kind_part) + "'");
    }
    for (Stage s : {Stage::sent, Stage::delivered, Stage::replayed, Stage::replay_reply}) {
        if (stage_part == to_string(s)) return {kind, s};
    }
    throw Error(Errc::parse, "unknown stage '" + std::string(stage_part) + "'");
}

Json optional_hex(const std::optional<Block32>& b) { return b ? Json(b->hex()) : Json(nullptr); }

std::optional<Block32> optional_from_json(const Json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return Block32::from_hex(j.at(key).get<std::string>());
}

}  // namespace

std::string format_transcript(const Transcript& transcript) {
    std::vector<std::string> body;
    body.reserve(transcript.events.size());
    for (const auto& ev : transcript.events) {
        body.push_back(transcript.session_id + " " + std::string(to_string(ev.direction)) + " " + ev.message_name() +
                       " " + to_hex(ev.payload) + " " + std::to_string(ev.at.ms));
    }
    return frame("pfs-transcript", kTranscriptFormatVersion, "curve=" + transcript.curve, body);
}

Transcript parse_transcript(std::string_view text) {
    const Framed f = unframe(text, "pfs-transcript", kTranscriptFormatVersion);
    Transcript out;
    out.curve = header_value(f, "curve");
    curve_by_name(out.curve);
    for (std::size_t i = 0; i < f.body.size(); ++i) {
        on_line(i + 1, [&] {
            const auto words = split_words(f.body[i]);
            if (words.size() != 5) {
                throw Error(Errc::truncated, "expected 5 fields, got " + std::to_string(words.size()));
            }
            if (i == 0) {
                out.session_id = std::string(words[0]);
            } else if (words[0] != out.session_id) {
                throw Error(Errc::parse, "session id changes mid-file (one session per transcript)");
            }
            const auto [kind, stage] = parse_message_name(words[2]);
            out.events.push_back(WireEvent{parse_direction(words[1]), kind, stage, from_hex(words[3]),
                                           Timestamp{parse_u64(words[4], "timestamp")}});
            return 0;
        });
    }
    return out;
}

std::string format_key(const ServerKey& key) {
    return frame("pfs-key", kKeyFormatVersion, "",
                 {"curve=" + key.curve().name, "s=" + scalar_to_block(key.secret()).hex(),
                  "pub=" + to_hex(point_encode(key.pub()))});
}

ServerKey parse_key(std::string_view text) {
    const Framed f = unframe(text, "pfs-key", kKeyFormatVersion);
    const Fields fields(f, "pfs-key");
    const CurveParams& curve = fields.curve();
    ServerKey key(fields.parse("s", [&](const std::string& v) { return block_to_scalar(Block32::from_hex(v), curve); }));
    const Point pub = fields.parse("pub", [&](const std::string& v) { return point_decode(curve, from_hex(v)); });
    if (pub != key.pub()) {
        throw Error(Errc::parse, "pfs-key: pub does not match s*P");
    }
    return key;
}

std::string format_card(const SmartCard& card) {
    return frame("pfs-card", kCardFormatVersion, "",
                 {"curve=" + card.pub.curve().name, "H=" + card.h.hex(), "E=" + card.e.hex(), "Z=" + card.z.hex(),
                  "Pub=" + to_hex(point_encode(card.pub))});
}

SmartCard parse_card(std::string_view text) {
    const Framed f = unframe(text, "pfs-card", kCardFormatVersion);
    const Fields fields(f, "pfs-card");
    const CurveParams& curve = fields.curve();
    return SmartCard{fields.block("H"), fields.block("E"), fields.block("Z"),
                     fields.parse("Pub", [&](const std::string& v) { return point_decode(curve, from_hex(v)); })};
}

std::string format_taps(const SessionRecord& record) {
    if (!record.taps) {
        throw Error(Errc::invalid_input, "session was run without unsafe taps");
    }
    const SessionTaps& t = *record.taps;
    std::vector<std::string> body{"session_id=" + record.transcript.session_id, "curve=" + record.transcript.curve,
                                  "outcome=" + record.outcome.describe()};
    auto put = [&body](const std::string& key, const std::optional<Block32>& v) {
        if (v) body.push_back(key + "=" + v->hex());
    };
    put("client_sk", t.client_sk ? std::optional(t.client_sk->sk) : std::nullopt);
    put("server_sk", t.server_sk ? std::optional(t.server_sk->sk) : std::nullopt);
    put("client_id", t.client_id);
    put("client_r_c", t.client_r_c);
    if (t.honest) {
        put("ID_c", t.honest->id);
        put("G_c", t.honest->g);
        put("E_c", t.honest->e);
        put("r_c", t.honest->r_c);
        put("r_s", t.honest->r_s);
        put("SK", t.honest->sk.sk);
    }
    put("replay_server_sk", t.replay_server_sk ? std::optional(t.replay_server_sk->sk) : std::nullopt);
    return frame("pfs-taps", kTapsFormatVersion, "", body);
}

TapsFile parse_taps(std::string_view text) {
    const Framed f = unframe(text, "pfs-taps", kTapsFormatVersion);
    const Fields fields(f, "pfs-taps");
    TapsFile out;
    out.session_id = fields.text("session_id");
    out.curve = fields.text("curve");
    out.outcome = fields.text("outcome");
    auto key = [&](const std::string& k) -> std::optional<SessionKey> {
        if (auto b = fields.optional_block(k)) return SessionKey{*b};
        return std::nullopt;
    };
    out.taps.client_sk = key("client_sk");
    out.taps.server_sk = key("server_sk");
    out.taps.client_id = fields.optional_block("client_id");
    out.taps.client_r_c = fields.optional_block("client_r_c");
    out.taps.replay_server_sk = key("replay_server_sk");
    if (fields.has("SK")) {
        out.taps.honest = HonestTaps{fields.block("ID_c"), fields.block("G_c"), fields.block("E_c"),
                                     fields.block("r_c"),  fields.block("r_s"), SessionKey{fields.block("SK")}};
    }
    return out;
}

std::string format_report(const RecoveredSession& r) {
    Json steps = Json::array();
    for (const auto& step : r.steps) {
        Json inputs = Json::array();
        for (const auto& [label, hex] : step.inputs) inputs.push_back({{"name", label}, {"hex", hex}});
        steps.push_back({{"index", step.index},
                         {"name", step.name},
                         {"formula", step.formula},
                         {"inputs", inputs},
                         {"output", step.output}});
    }
    Json j{
        {"format", "pfs-report"},
        {"version", kReportFormatVersion},
        {"session_id", r.session_id},
        {"curve", r.curve},
        {"status", r.complete() ? "recovered" : "failed"},
        {"ID_c", optional_hex(r.id)},
        {"G_c", optional_hex(r.g)},
        {"E_c", optional_hex(r.e)},
        {"r_c", optional_hex(r.r_c)},
        {"r_s", optional_hex(r.r_s)},
        {"SK", r.sk ? Json(r.sk->sk.hex()) : Json(nullptr)},
        {"steps", steps},
    };
    if (r.failure) {
        j["failure"] = {{"step", r.failure->step}, {"reason", r.failure->reason}};
    }
    return j.dump(2) + "\n";
}

RecoveredSession parse_report(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        throw Error(Errc::parse, std::string("report is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format") != "pfs-report") {
            throw Error(Errc::parse, "not a pfs-report");
        }
        if (j.at("version") != kReportFormatVersion) {
            throw Error(Errc::version_mismatch, "report version " + j.at("version").dump() + " is not supported");
        }
        RecoveredSession r;
        r.session_id = j.at("session_id").get<std::string>();
        r.curve = j.at("curve").get<std::string>();
        r.id = optional_from_json(j, "ID_c");
        r.g = optional_from_json(j, "G_c");
        r.e = optional_from_json(j, "E_c");
        r.r_c = optional_from_json(j, "r_c");
        r.r_s = optional_from_json(j, "r_s");
        if (auto sk = optional_from_json(j, "SK")) r.sk = SessionKey{*sk};
        for (const auto& s : j.at("steps")) {
            AttackStep step{s.at("index").get<int>(), s.at("name").get<std::string>(),
                            s.at("formula").get<std::string>(), {}, s.at("output").get<std::string>()};
            for (const auto& in : s.at("inputs")) {
                step.inputs.emplace_back(in.at("name").get<std::string>(), in.at("hex").get<std::string>());
            }
            r.steps.push_back(std::move(step));
        }
        if (j.contains("failure")) {
            r.failure = AttackFailure{j["failure"].at("step").get<int>(), j["failure"].at("reason").get<std::string>()};
        }
        return r;
    } catch (const Json::exception& e) {
        throw Error(Errc::parse, std::string("report is missing fields: ") + e.what());
    }
}

std::string render_trace(const RecoveredSession& r) {
    std::ostringstream out;
    out << "session " << r.session_id << " on " << r.curve << "\n";
    for (const auto& step : r.steps) {
        out << "  [" << step.index << "/" << kAttackSteps << "] " << step.name << " = " << step.formula << "\n";
        for (const auto& [label, hex] : step.inputs) {
            out << "        " << label << " = " << hex << "\n";
        }
        out << "      -> " << step.name << " = " << step.output << "\n";
    }
    if (r.failure) {
        out << "  attack stopped at step " << r.failure->step << ": " << r.failure->reason << "\n";
    } else if (r.sk) {
        out << "  recovered session key: " << r.sk->sk.hex() << "\n";
    }
    return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::io, "cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::io, "cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw Error(Errc::io, "write failed for " + path.string());
    }
}

}  // namespace pfs
