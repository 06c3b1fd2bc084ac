#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pfs/adversary.hpp"
#include "pfs/error.hpp"
#include "pfs/files.hpp"
#include "pfs/harness.hpp"

namespace pfs::cli {

namespace fs = std::filesystem;

namespace {

fs::path default_out_dir() {
    if (const char* env = std::getenv("PFS_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return ".";
}

struct Credentials {
    std::string id;
    std::string pw;
    std::string bio;

    void add_to(CLI::App& cmd) {
        const ClientSecrets d = default_credentials();
        id = d.identity;
        pw = d.password;
        bio.assign(d.biometric.begin(), d.biometric.end());
        cmd.add_option("--id", id, "Client identity")->capture_default_str();
        cmd.add_option("--pw", pw, "Client password");
        cmd.add_option("--bio", bio, "Client biometric template (exact-match byte string)");
    }

    ClientSecrets secrets() const { return ClientSecrets{id, pw, Bytes(bio.begin(), bio.end())}; }
};

struct RegisterArgs {
    std::string curve = "toy17";
    std::uint64_t seed = 1;
    Credentials creds;
    std::string key_in;
    fs::path key_out;
    fs::path card_out;
};

struct HandshakeArgs {
    std::string curve = "toy17";
    std::uint64_t seed = 1;
    std::int64_t dt_ms = kDefaultFreshnessWindow.count();
    double drop = 0.0;
    double tamper = 0.0;
    bool replay = false;
    std::uint64_t delay_ms = 0;
    bool taps = false;
    bool wall_clock = false;
    Credentials creds;
    std::string card_in;
    std::string key_in;
    fs::path transcript_out;
    fs::path key_out;
    fs::path taps_out;
};

struct AttackArgs {
    fs::path transcript;
    fs::path key;
    fs::path report;
};

struct VerifyArgs {
    fs::path report;
    fs::path taps;
};

struct DemoArgs {
    std::string curve = "toy17";
    std::uint64_t seed = 7;
    std::int64_t dt_ms = kDefaultFreshnessWindow.count();
    fs::path out_dir;
};

int run_register(const RegisterArgs& a, std::ostream& out) {
    const CurveParams& curve = curve_by_name(a.curve);
    RunConfig seeds = RunConfig::from_seed(a.seed, a.curve);
    Rng server_rng(seeds.server_seed);
    Rng client_rng(seeds.client_seed);

    const bool fresh_key = a.key_in.empty();
    const ServerKey key = fresh_key ? ServerKey::generate(server_rng, curve) : parse_key(read_text_file(a.key_in));
    if (!same_curve(key.curve(), curve)) {
        throw Error(Errc::config, "key file is for " + key.curve().name + ", --curve is " + curve.name);
    }
    const ClientSecrets secrets = a.creds.secrets();
    const ClientRegistration reg = client_register_request(secrets, curve, client_rng);
    const SmartCard card = client_finalize_card(server_register(reg.request, key), secrets, reg.a);

    write_text_file(a.card_out, format_card(card));
    out << "registered " << secrets.identity << " on " << curve.name << "\n";
    out << "  card  -> " << a.card_out.string() << "\n";
    if (fresh_key) {
        write_text_file(a.key_out, format_key(key));
        out << "  key   -> " << a.key_out.string() << "\n";
    }
    out << "  Pub   =  " << to_hex(point_encode(key.pub())) << "\n";
    return kExitOk;
}

int run_handshake(const HandshakeArgs& a, std::ostream& out) {
    RunConfig cfg = RunConfig::from_seed(a.seed, a.curve);
    if (a.dt_ms < 0) throw Error(Errc::config, "--dt-ms must be non-negative");
    cfg.window = Millis{a.dt_ms};
    cfg.credentials = a.creds.secrets();
    cfg.channel.drop_probability = a.drop;
    cfg.channel.tamper_probability = a.tamper;
    cfg.channel.replay = a.replay;
    cfg.channel.delay_ms = a.delay_ms;
    cfg.clock = a.wall_clock ? ClockMode::wall : ClockMode::logical;
    cfg.unsafe_taps = a.taps;
    if (!a.card_in.empty() && a.key_in.empty()) {
        throw Error(Errc::config, "--card needs the matching --key");
    }
    if (!a.key_in.empty()) cfg.server_key = parse_key(read_text_file(a.key_in));
    if (!a.card_in.empty()) cfg.card = parse_card(read_text_file(a.card_in));

    const SessionRecord record = run_session(cfg);
    write_text_file(a.transcript_out, format_transcript(record.transcript));
    out << "session " << record.transcript.session_id << " on " << record.transcript.curve << ": "
        << record.outcome.describe() << "\n";
    if (record.replay_outcome) {
        out << "replayed request: " << record.replay_outcome->describe() << "\n";
    }
    out << "  transcript -> " << a.transcript_out.string() << " (" << record.transcript.events.size()
        << " wire events)\n";
    if (!cfg.server_key) {
        write_text_file(a.key_out, format_key(record.server_key));
        out << "  key        -> " << a.key_out.string() << "\n";
    }
    if (record.taps) {
        write_text_file(a.taps_out, format_taps(record));
        out << "  taps       -> " << a.taps_out.string() << " (unsafe: honest-party secrets)\n";
    }
    return kExitOk;
}

int run_attack(const AttackArgs& a, std::ostream& out) {
    const Transcript transcript = parse_transcript(read_text_file(a.transcript));
    const ServerKey key = parse_key(read_text_file(a.key));
    const RecoveredSession recovered = trace_attack(transcript, key.secret());
    out << render_trace(recovered);
    write_text_file(a.report, format_report(recovered));
    out << "report -> " << a.report.string() << "\n";
    return recovered.complete() ? kExitOk : kExitMismatch;
}

BreakVerdict verdict_against(const RecoveredSession& recovered, const TapsFile& taps) {
    if (taps.taps.honest) return verify_break(recovered, *taps.taps.honest);
    if (taps.taps.server_sk) return verify_break(recovered, *taps.taps.server_sk);
    return BreakVerdict{false, std::nullopt};
}

int run_verify(const VerifyArgs& a, std::ostream& out) {
    const RecoveredSession recovered = parse_report(read_text_file(a.report));
    const TapsFile taps = parse_taps(read_text_file(a.taps));
    if (recovered.session_id != taps.session_id) {
        throw Error(Errc::invalid_input,
                    "report is for session " + recovered.session_id + ", taps are for " + taps.session_id);
    }
    const BreakVerdict v = verdict_against(recovered, taps);
    if (v.match) {
        out << "MATCH: recovered SK equals the honest session key " << recovered.sk->sk.hex() << "\n";
        return kExitOk;
    }
    out << "MISMATCH";
    if (v.diverging_step) out << ": first diverging step " << *v.diverging_step;
    if (!taps.taps.honest && !taps.taps.server_sk) out << ": no honest session key recorded (" << taps.outcome << ")";
    out << "\n";
    return kExitMismatch;
}

int run_demo(const DemoArgs& a, std::ostream& out) {
    RunConfig cfg = RunConfig::from_seed(a.seed, a.curve);
    if (a.dt_ms < 0) throw Error(Errc::config, "--dt-ms must be non-negative");
    cfg.window = Millis{a.dt_ms};
    cfg.unsafe_taps = true;

    out << "== registration (secure channel, in-process) on " << cfg.curve << "\n";
    const SessionRecord record = run_session(cfg);
    const fs::path dir = a.out_dir;
    write_text_file(dir / "card.txt", format_card(record.card));
    write_text_file(dir / "server.key", format_key(record.server_key));
    write_text_file(dir / "transcript.txt", format_transcript(record.transcript));
    write_text_file(dir / "taps.txt", format_taps(record));
    out << "   card issued to " << cfg.credentials.identity << ", Pub = " << to_hex(point_encode(record.server_key.pub()))
        << "\n";

    out << "== login over the public channel: " << record.outcome.describe() << "\n";
    for (const auto& ev : record.transcript.events) {
        out << "   " << to_string(ev.direction) << " " << ev.message_name() << " t=" << ev.at.ms << " "
            << to_hex(ev.payload) << "\n";
    }
    if (!record.outcome.completed) {
        out << "honest session did not complete; nothing to break\n";
        return kExitMismatch;
    }

    out << "== later: the server's long-term key s leaks\n";
    const Transcript captured = parse_transcript(read_text_file(dir / "transcript.txt"));
    const ServerKey leaked = parse_key(read_text_file(dir / "server.key"));
    out << "   s = " << scalar_to_block(leaked.secret()).hex() << "\n";

    out << "== replaying the recorded transcript through the key-recovery chain\n";
    const RecoveredSession recovered = trace_attack(captured, leaked.secret());
    out << render_trace(recovered);
    write_text_file(dir / "report.json", format_report(recovered));

    const SessionTaps& taps = *record.taps;
    const BreakVerdict v = verify_break(recovered, *taps.honest);
    out << "== result\n";
    out << "   SK(client) = " << taps.client_sk->sk.hex() << "\n";
    out << "   SK(server) = " << taps.server_sk->sk.hex() << "\n";
    out << "   SK(attack) = " << (recovered.sk ? recovered.sk->sk.hex() : std::string("<none>")) << "\n";
    const bool broken = v.match && recovered.sk == taps.client_sk;
    out << (broken ? "   forward secrecy broken: past session key recovered from transcript + s\n"
                   : "   attack did not reproduce the session key\n");
    out << "   files in " << dir.string() << ": card.txt server.key transcript.txt taps.txt report.json\n";
    return broken ? kExitOk : kExitMismatch;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Smart-card three-factor key agreement and its forward-secrecy break"};
    app.require_subcommand(1);
    const fs::path out_dir = default_out_dir();

    RegisterArgs reg;
    reg.key_out = out_dir / "server.key";
    reg.card_out = out_dir / "card.txt";
    auto* reg_cmd = app.add_subcommand("register", "Issue a smart card (writes card and key files)");
    reg_cmd->add_option("--curve", reg.curve, "toy17 or std256")->capture_default_str();
    reg_cmd->add_option("--seed", reg.seed, "Seed for key and nonce generation")->capture_default_str();
    reg.creds.add_to(*reg_cmd);
    reg_cmd->add_option("--key", reg.key_in, "Existing server key file (default: generate one)");
    reg_cmd->add_option("--key-out", reg.key_out, "Where to write a generated server key")->capture_default_str();
    reg_cmd->add_option("--card-out", reg.card_out, "Where to write the card")->capture_default_str();

    HandshakeArgs hs;
    hs.transcript_out = out_dir / "transcript.txt";
    hs.key_out = out_dir / "server.key";
    hs.taps_out = out_dir / "taps.txt";
    auto* hs_cmd = app.add_subcommand("handshake", "Run one login session through a channel policy");
    hs_cmd->add_option("--curve", hs.curve, "toy17 or std256")->capture_default_str();
    hs_cmd->add_option("--seed", hs.seed, "Seed for client, server and channel randomness")->capture_default_str();
    hs_cmd->add_option("--dt-ms", hs.dt_ms, "Freshness window in milliseconds")->capture_default_str();
    hs_cmd->add_option("--drop", hs.drop, "Per-message drop probability")->check(CLI::Range(0.0, 1.0));
    hs_cmd->add_option("--tamper", hs.tamper, "Per-message probability of flipping one byte")
        ->check(CLI::Range(0.0, 1.0));
    hs_cmd->add_flag("--replay", hs.replay, "Re-deliver the captured login request once");
    hs_cmd->add_option("--delay-ms", hs.delay_ms, "Extra latency per hop");
    hs_cmd->add_flag("--taps", hs.taps, "Also write honest-party secrets (test-only)");
    hs_cmd->add_flag("--wall-clock", hs.wall_clock, "Use the system clock instead of the logical clock");
    hs.creds.add_to(*hs_cmd);
    hs_cmd->add_option("--card", hs.card_in, "Card file from `register` (default: register in-process)");
    hs_cmd->add_option("--key", hs.key_in, "Server key file (default: generate from --seed)");
    hs_cmd->add_option("--out", hs.transcript_out, "Transcript file")->capture_default_str();
    hs_cmd->add_option("--key-out", hs.key_out, "Where to write a generated server key")->capture_default_str();
    hs_cmd->add_option("--taps-out", hs.taps_out, "Where to write taps")->capture_default_str();

    AttackArgs atk;
    atk.report = out_dir / "report.json";
    auto* atk_cmd = app.add_subcommand("attack", "Recover a past session key from a transcript and the server key");
    atk_cmd->add_option("--transcript", atk.transcript, "Captured transcript")->required();
    atk_cmd->add_option("--key", atk.key, "Compromised server key file")->required();
    atk_cmd->add_option("--report", atk.report, "Where to write the JSON report")->capture_default_str();

    VerifyArgs ver;
    auto* ver_cmd = app.add_subcommand("verify", "Compare an attack report with the honest parties' taps");
    ver_cmd->add_option("--report", ver.report, "Report from `attack`")->required();
    ver_cmd->add_option("--taps", ver.taps, "Taps from `handshake --taps`")->required();

    DemoArgs demo;
    demo.out_dir = out_dir;
    auto* demo_cmd = app.add_subcommand("demo", "Register, handshake, leak s, recover SK, verify");
    demo_cmd->add_option("--curve", demo.curve, "toy17 or std256")->capture_default_str();
    demo_cmd->add_option("--seed", demo.seed, "Seed for the whole run")->capture_default_str();
    demo_cmd->add_option("--dt-ms", demo.dt_ms, "Freshness window in milliseconds")->capture_default_str();
    demo_cmd->add_option("--out-dir", demo.out_dir, "Directory for all produced files")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*reg_cmd) return run_register(reg, out);
        if (*hs_cmd) return run_handshake(hs, out);
        if (*atk_cmd) return run_attack(atk, out);
        if (*ver_cmd) return run_verify(ver, out);
        if (*demo_cmd) return run_demo(demo, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace pfs::cli
