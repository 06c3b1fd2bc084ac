#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pfs/codec.hpp"
#include "pfs/protocol.hpp"

namespace pfs {

enum class Direction { client_to_server, server_to_client };

enum class MessageKind { login_request, login_response };

/// Where on the channel a message was observed.
enum class Stage {
    sent,         // as emitted by the honest sender
    delivered,    // as handed to the receiver, after the channel policy
    replayed,     // a captured request re-delivered by the adversary
    replay_reply  // the server's answer to a replayed request
};

std::string_view to_string(Direction d) noexcept;
std::string_view to_string(MessageKind k) noexcept;
std::string_view to_string(Stage s) noexcept;

/// One public-channel observation.
struct WireEvent {
    Direction direction;
    MessageKind kind;
    Stage stage;
    Bytes payload;
    Timestamp at;

    /// "LoginRequest.delivered" and so on.
    std::string message_name() const;

    friend bool operator==(const WireEvent&, const WireEvent&) = default;
};

/// Everything a passive eavesdropper captured for one session. Holds public bytes only.
struct Transcript {
    std::string session_id;
    std::string curve;
    std::vector<WireEvent> events;

    /// First delivered LoginRequest; throws Error(parse) if the capture has none.
    const Bytes& request() const;
    /// First delivered LoginResponse; throws Error(parse) if the capture has none.
    const Bytes& response() const;

    friend bool operator==(const Transcript&, const Transcript&) = default;
};

/// One derivation in the key-recovery chain.
struct AttackStep {
    int index = 0;
    std::string name;     // "ID_c", "G_c", ...
    std::string formula;  // human-readable relation used
    std::vector<std::pair<std::string, std::string>> inputs;  // label -> hex
    std::string output;   // hex

    friend bool operator==(const AttackStep&, const AttackStep&) = default;
};

struct AttackFailure {
    int step = 0;
    std::string reason;

    friend bool operator==(const AttackFailure&, const AttackFailure&) = default;
};

/// Output of the key-recovery chain. On success every intermediate is set and steps
/// has six entries; on failure the chain stops at failure->step.
struct RecoveredSession {
    std::string session_id;
    std::string curve;
    std::optional<Block32> id;
    std::optional<Block32> g;
    std::optional<Digest> e;
    std::optional<Block32> r_c;  // scalar encodings
    std::optional<Block32> r_s;
    std::optional<SessionKey> sk;
    std::vector<AttackStep> steps;
    std::optional<AttackFailure> failure;

    bool complete() const noexcept { return !failure && sk.has_value(); }

    friend bool operator==(const RecoveredSession&, const RecoveredSession&) = default;
};

inline constexpr int kAttackSteps = 6;

/// Runs the chain as far as it goes and records where it stopped: an off-curve M_c stops
/// step 1, a missing response stops step 5. Throws Error(parse) when the transcript is
/// malformed (no delivered request, wrong message length) and Error(invalid_input) when
/// s belongs to another curve.
RecoveredSession trace_attack(const Transcript& transcript, const Scalar& s);

/// Recovers the session key of a past session from its transcript and the server's
/// long-term secret s:
///   1. ID_c = PID_c xor mask(s^-1 * M_c)
///   2. G_c  = h(ID_c || s)
///   3. E_c  = h(G_c || ID_c)
///   4. r_c  = N_c xor h(E_c || t_c)
///   5. r_s  = O_s xor r_c
///   6. SK   = h(G_c || r_c || r_s || t_c || t_s)
/// Requires a complete request/response pair (Error(parse) otherwise). Throws
/// AttackStepError naming the step when an unmasked value is not a valid scalar.
RecoveredSession pfs_attack(const Transcript& transcript, const Scalar& s);

/// Intermediates taken from the honest parties; test-only.
struct HonestTaps {
    Block32 id;
    Block32 g;
    Digest e;
    Block32 r_c;
    Block32 r_s;
    SessionKey sk;

    friend bool operator==(const HonestTaps&, const HonestTaps&) = default;
};

struct BreakVerdict {
    bool match = false;
    std::optional<int> diverging_step;
};

/// match iff the recovered SK equals the honest one. On mismatch, walks the six steps
/// against the taps and reports the first one that differs (or the step the chain
/// stopped at).
BreakVerdict verify_break(const RecoveredSession& recovered, const HonestTaps& truth);

/// Same check when only the ground-truth key is known: step is left empty on mismatch.
BreakVerdict verify_break(const RecoveredSession& recovered, const SessionKey& truth);

}  // namespace pfs
