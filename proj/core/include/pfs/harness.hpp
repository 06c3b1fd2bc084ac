#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pfs/adversary.hpp"
#include "pfs/error.hpp"
#include "pfs/protocol.hpp"

namespace pfs {

/// Unreliable-channel model applied to every public message.
struct ChannelPolicy {
    double drop_probability = 0.0;
    double tamper_probability = 0.0;  // flips one uniformly chosen byte
    bool replay = false;              // re-deliver the captured request once
    std::uint64_t delay_ms = 0;       // added to every hop
    std::uint64_t seed = 0;

    /// Throws Error(config) for probabilities outside [0, 1].
    void validate() const;
};

enum class ClockMode { logical, wall };

inline constexpr std::uint64_t kLogicalEpochMs = 1'700'000'000'000;

struct RunConfig {
    std::string curve = "toy17";
    Millis window = kDefaultFreshnessWindow;
    std::uint64_t client_seed = 0;
    std::uint64_t server_seed = 0;
    ClockMode clock = ClockMode::logical;
    std::uint64_t clock_start_ms = kLogicalEpochMs;
    ClientSecrets credentials;
    ChannelPolicy channel;
    std::string session_id;  // derived from the seeds when empty

    /// Preloaded artifacts; generated (key) or registered (card) in-process when absent.
    std::optional<ServerKey> server_key;
    std::optional<SmartCard> card;

    /// Keeps honest-party secrets in the SessionRecord. Never persisted with a transcript.
    bool unsafe_taps = false;

    /// Client, server and channel streams all derived from one seed.
    static RunConfig from_seed(std::uint64_t seed, std::string curve);
};

ClientSecrets default_credentials();

enum class Party { client, server, channel };

std::string_view to_string(Party p) noexcept;

struct Outcome {
    bool completed = false;
    std::optional<Party> aborted_by;
    std::optional<Errc> code;  // empty for a channel drop
    std::string reason;

    std::string describe() const;
};

/// Test-only view into the honest parties.
struct SessionTaps {
    std::optional<SessionKey> client_sk;
    std::optional<SessionKey> server_sk;
    std::optional<HonestTaps> honest;  // server-side intermediates plus its SK
    std::optional<SessionKey> replay_server_sk;
    std::optional<Block32> client_id;  // client-side originals, for the unmasking chain
    std::optional<Block32> client_r_c;
};

struct SessionRecord {
    RunConfig config;
    ServerKey server_key;
    SmartCard card;
    Transcript transcript;
    Outcome outcome;
    std::optional<Outcome> replay_outcome;
    std::optional<SessionTaps> taps;  // set only with RunConfig::unsafe_taps
};

/// Registration in-process, then the two-message login through the channel policy.
/// Protocol aborts land in SessionRecord::outcome; only configuration problems throw
/// (Error(config)).
SessionRecord run_session(const RunConfig& cfg);

}  // namespace pfs
