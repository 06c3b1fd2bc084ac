// Acceptance suite: one line per criterion, exit status 0 iff every criterion passes.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles/toy_group.hpp"
#include "pfs/error.hpp"
#include "pfs/files.hpp"
#include "pfs/harness.hpp"

namespace {

using namespace pfs;
using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

SessionRecord tapped_session(const std::string& curve, std::uint64_t seed) {
    RunConfig cfg = RunConfig::from_seed(seed, curve);
    cfg.unsafe_taps = true;
    return run_session(cfg);
}

/// The adversary works from the persisted bytes, never the in-memory record.
Transcript through_file_format(const Transcript& t) { return parse_transcript(format_transcript(t)); }

// 1. PFS break: 1,000 toy17 + 100 std256 sessions, exact SK recovery, < 10 s.
Verdict pfs_break_reproduction() {
    const auto start = Clock::now();
    int ok = 0;
    int total = 0;
    for (const auto& [curve, count] : {std::pair{"toy17", 1000}, std::pair{"std256", 100}}) {
        for (int i = 0; i < count; ++i) {
            const SessionRecord rec = tapped_session(curve, 10'000 + static_cast<std::uint64_t>(i));
            ++total;
            if (!rec.outcome.completed) continue;
            const RecoveredSession got = trace_attack(through_file_format(rec.transcript), rec.server_key.secret());
            if (got.complete() && *got.sk == *rec.taps->client_sk && *got.sk == *rec.taps->server_sk) ++ok;
        }
    }
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << ok << "/" << total << " keys recovered exactly, " << elapsed << " s (limit 10 s)";
    return {ok == total && elapsed < 10.0, d.str()};
}

// 2. Step-local correctness on 100 tapped sessions.
Verdict step_local_correctness() {
    int failures = 0;
    for (int i = 0; i < 100; ++i) {
        const SessionRecord rec = tapped_session(i % 2 ? "toy17" : "std256", 20'000 + static_cast<std::uint64_t>(i));
        if (!rec.outcome.completed) {
            ++failures;
            continue;
        }
        const RecoveredSession got = trace_attack(through_file_format(rec.transcript), rec.server_key.secret());
        const HonestTaps& t = *rec.taps->honest;
        const bool all = got.complete() && got.steps.size() == static_cast<std::size_t>(kAttackSteps) &&
                         *got.id == t.id && *got.id == *rec.taps->client_id && *got.g == t.g && *got.e == t.e &&
                         *got.r_c == t.r_c && *got.r_c == *rec.taps->client_r_c && *got.r_s == t.r_s &&
                         *got.sk == t.sk;
        if (!all) ++failures;
    }
    return {failures == 0, std::to_string(failures) + " of 100 sessions with any differing intermediate"};
}

// 3. 1,000 clean-channel sessions agree on SK.
Verdict honest_protocol_correctness() {
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        const SessionRecord rec = tapped_session("toy17", 30'000 + static_cast<std::uint64_t>(i));
        if (!rec.outcome.completed || !rec.taps->client_sk || rec.taps->client_sk != rec.taps->server_sk) ++mismatches;
    }
    return {mismatches == 0, std::to_string(mismatches) + " of 1000 sessions incomplete or with differing keys"};
}

bool rejected_at_specified_check(Errc code) {
    return code == Errc::auth_mismatch || code == Errc::stale_timestamp || code == Errc::parse;
}

// 4. 1,000 single-field corruptions per message, >= 99.9% rejected at a specified check.
Verdict abort_rule_robustness() {
    const CurveParams& curve = toy17();
    const Millis window = kDefaultFreshnessWindow;
    const Timestamp t0{kLogicalEpochMs};
    Rng corrupt(4040);

    ServerKey key = ServerKey::generate(corrupt, curve);
    const ClientSecrets secrets = default_credentials();
    const ClientRegistration reg = client_register_request(secrets, curve, corrupt);
    const SmartCard card = client_finalize_card(server_register(reg.request, key), secrets, reg.a);

    const std::size_t point_len = 2 * curve.field_bytes() + 1;
    const std::size_t req_offsets[] = {0, point_len, point_len + 32, point_len + 64, point_len + 96};
    const std::size_t req_widths[] = {point_len, 32, 32, 32, 8};
    const std::size_t resp_offsets[] = {0, 32, 64};
    const std::size_t resp_widths[] = {32, 32, 8};

    int req_rejected = 0;
    int resp_rejected = 0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
        Rng client_rng(50'000 + static_cast<std::uint64_t>(i));
        Rng server_rng(60'000 + static_cast<std::uint64_t>(i));
        const ClientLogin login = client_login_begin(card, secrets, t0, client_rng);

        Bytes req = login.request.encode();
        const int field = i % 5;
        req[req_offsets[field] + corrupt() % req_widths[field]] ^= static_cast<std::uint8_t>(1 + corrupt() % 255);
        try {
            server_handle_login(LoginRequest::decode(curve, req), key, Timestamp{t0.ms + 1}, window, server_rng);
        } catch (const Error& e) {
            if (rejected_at_specified_check(e.code())) ++req_rejected;
        }

        const ServerSession srv =
            server_handle_login(login.request, key, Timestamp{t0.ms + 1}, window, server_rng);
        Bytes resp = srv.response.encode();
        const int rfield = i % 3;
        resp[resp_offsets[rfield] + corrupt() % resp_widths[rfield]] ^= static_cast<std::uint8_t>(1 + corrupt() % 255);
        try {
            client_complete(login.session, LoginResponse::decode(resp), Timestamp{t0.ms + 2}, window);
        } catch (const Error& e) {
            if (rejected_at_specified_check(e.code())) ++resp_rejected;
        }
    }
    const double req_rate = static_cast<double>(req_rejected) / trials;
    const double resp_rate = static_cast<double>(resp_rejected) / trials;
    std::ostringstream d;
    d << "request " << req_rejected << "/" << trials << ", response " << resp_rejected << "/" << trials
      << " rejected (threshold 99.9%)";
    return {req_rate >= 0.999 && resp_rate >= 0.999, d.str()};
}

// 5. Wrong key never yields the true SK.
Verdict negative_attack_control() {
    Rng rng(5050);
    int matches = 0;
    for (int i = 0; i < 1000; ++i) {
        const SessionRecord rec = tapped_session("toy17", 70'000 + static_cast<std::uint64_t>(i));
        Scalar wrong = scalar_random(rng, toy17());
        while (wrong == rec.server_key.secret()) wrong = scalar_random(rng, toy17());
        const RecoveredSession got = trace_attack(through_file_format(rec.transcript), wrong);
        if (verify_break(got, *rec.taps->server_sk).match) ++matches;
    }
    return {matches == 0, std::to_string(matches) + " of 1000 wrong-key attacks matched the true SK"};
}

// 6. Group arithmetic against the exhaustive table, plus 18x18 cancellation, < 1 s.
Verdict group_math_oracle() {
    const auto start = Clock::now();
    const auto table = oracle::toy::multiples_of_g();
    const Point g = Point::generator(toy17());
    int bad = 0;
    for (int k = 1; k <= 19; ++k) {
        const Point got = point_mul(Scalar::reduce(toy17(), k), g);
        const Point want = table[k] ? Point::affine(toy17(), table[k]->first, table[k]->second)
                                    : Point::identity(toy17());
        if (got != want) ++bad;
    }
    int cancel_bad = 0;
    for (int r = 1; r < 19; ++r) {
        for (int s = 1; s < 19; ++s) {
            const Scalar rs(toy17(), r), ss(toy17(), s);
            const Point m = point_mul(rs, point_mul(ss, g));
            if (point_encode(point_mul(scalar_invert(ss), m)) != point_encode(point_mul(rs, g))) ++cancel_bad;
        }
    }
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << bad << " table mismatches over k in [1,19], " << cancel_bad << " of 324 cancellation failures, " << elapsed
      << " s (limit 1 s)";
    return {bad == 0 && cancel_bad == 0 && elapsed < 1.0, d.str()};
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "pfsbreak");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

// 7. demo --curve toy17 --seed 7 twice gives byte-identical files.
Verdict determinism() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "pfs-acceptance-determinism";
    fs::remove_all(base);
    const int a = run_cli({"demo", "--curve", "toy17", "--seed", "7", "--out-dir", (base / "run1").string()});
    const int b = run_cli({"demo", "--curve", "toy17", "--seed", "7", "--out-dir", (base / "run2").string()});
    bool same = a == 0 && b == 0;
    std::string which;
    for (const char* f : {"transcript.txt", "report.json"}) {
        if (read_text_file(base / "run1" / f) != read_text_file(base / "run2" / f)) {
            same = false;
            which += std::string(" ") + f;
        }
    }
    fs::remove_all(base);
    return {same, "exit codes " + std::to_string(a) + "/" + std::to_string(b) +
                      (which.empty() ? ", transcript and report identical" : ", differing:" + which)};
}

// 8. A replayed request inside the window is accepted (documented weakness).
Verdict replay_property() {
    int accepted = 0;
    const int sessions = 20;
    for (int i = 0; i < sessions; ++i) {
        RunConfig cfg = RunConfig::from_seed(80'000 + static_cast<std::uint64_t>(i), i % 2 ? "toy17" : "std256");
        cfg.unsafe_taps = true;
        cfg.channel.replay = true;
        const SessionRecord rec = run_session(cfg);
        if (rec.outcome.completed && rec.replay_outcome && rec.replay_outcome->completed &&
            rec.taps->replay_server_sk.has_value()) {
            ++accepted;
        }
    }
    return {accepted == sessions,
            std::to_string(accepted) + "/" + std::to_string(sessions) + " replayed requests accepted inside the window"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"AC1 forward-secrecy break reproduction", pfs_break_reproduction},
        {"AC2 step-local attack correctness", step_local_correctness},
        {"AC3 honest protocol correctness", honest_protocol_correctness},
        {"AC4 abort-rule robustness", abort_rule_robustness},
        {"AC5 negative attack control", negative_attack_control},
        {"AC6 group-math oracle equivalence", group_math_oracle},
        {"AC7 determinism of demo artifacts", determinism},
        {"AC8 replay accepted inside freshness window", replay_property},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v{false, {}};
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << name << ": " << v.detail << std::endl;
        if (!v.pass) ++failed;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " acceptance criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
