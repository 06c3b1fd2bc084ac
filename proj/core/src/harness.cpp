#include "pfs/harness.hpp"

#include <chrono>

#include "pfs/error.hpp"

namespace pfs {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// uniform in [0, 1) from the top 53 bits; std distributions are not bit-stable across
// standard libraries
double unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

class Clock {
public:
    Clock(ClockMode mode, std::uint64_t start) : mode_(mode), now_(start) {}

    Timestamp now() const {
        if (mode_ == ClockMode::wall) {
            const auto since = std::chrono::system_clock::now().time_since_epoch();
            return Timestamp{static_cast<std::uint64_t>(std::chrono::duration_cast<Millis>(since).count()) + skew_};
        }
        return Timestamp{now_};
    }

    /// Logical time moves by exactly ms; wall time accumulates ms as simulated latency.
    void advance(std::uint64_t ms) {
        if (mode_ == ClockMode::wall) {
            skew_ += ms;
        } else {
            now_ += ms;
        }
    }

private:
    ClockMode mode_;
    std::uint64_t now_;
    std::uint64_t skew_ = 0;
};

class Channel {
public:
    explicit Channel(const ChannelPolicy& policy) : policy_(policy), rng_(policy.seed) {}

    /// Empty when the message is dropped. Decisions are drawn in a fixed order.
    std::optional<Bytes> transmit(const Bytes& payload) {
        const bool drop = unit(rng_) < policy_.drop_probability;
        const bool tamper = unit(rng_) < policy_.tamper_probability;
        if (drop) return std::nullopt;
        Bytes out = payload;
        if (tamper && !out.empty()) {
            const auto pos = static_cast<std::size_t>(rng_() % out.size());
            out[pos] ^= static_cast<std::uint8_t>(1 + rng_() % 255);
        }
        return out;
    }

private:
    ChannelPolicy policy_;
    Rng rng_;
};

Outcome aborted(Party party, const Error& err) { return Outcome{false, party, err.code(), err.what()}; }

HonestTaps honest_from(const ServerSession& s) {
    return HonestTaps{s.id, s.g, s.e, scalar_to_block(s.r_c), scalar_to_block(s.r_s), s.key};
}

std::string derive_session_id(const RunConfig& cfg) {
    const Digest d = hash_fields({hash(Bytes(cfg.curve.begin(), cfg.curve.end())),
                                  Timestamp{cfg.client_seed}, Timestamp{cfg.server_seed},
                                  Timestamp{cfg.channel.seed}});
    return "sess-" + d.hex().substr(0, 16);
}

}  // namespace

void ChannelPolicy::validate() const {
    auto check = [](double p, const char* what) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(Errc::config, std::string(what) + " must be in [0, 1]");
        }
    };
    check(drop_probability, "drop probability");
    check(tamper_probability, "tamper probability");
}

RunConfig RunConfig::from_seed(std::uint64_t seed, std::string curve) {
    RunConfig cfg;
    cfg.curve = std::move(curve);
    cfg.client_seed = splitmix64(seed ^ 0x636c69656e74ULL);
    cfg.server_seed = splitmix64(seed ^ 0x736572766572ULL);
    cfg.channel.seed = splitmix64(seed ^ 0x6368616e6e6cULL);
    cfg.credentials = default_credentials();
    return cfg;
}

ClientSecrets default_credentials() {
    const std::string bio = "minutiae:3f9a-77c1-0b42-e8d5";
    return ClientSecrets{"alice@client.example", "correct horse battery staple", Bytes(bio.begin(), bio.end())};
}

std::string_view to_string(Party p) noexcept {
    switch (p) {
        case Party::client: return "client";
        case Party::server: return "server";
        case Party::channel: return "channel";
    }
    return "unknown";
}

std::string Outcome::describe() const {
    if (completed) return "completed";
    std::string out = "aborted";
    if (aborted_by) out += " by " + std::string(to_string(*aborted_by));
    if (code) out += " (" + std::string(to_string(*code)) + ")";
    if (!reason.empty()) out += ": " + reason;
    return out;
}

SessionRecord run_session(const RunConfig& cfg) {
    cfg.channel.validate();
    if (cfg.window.count() < 0) {
        throw Error(Errc::config, "freshness window must be non-negative");
    }
    const CurveParams& curve = curve_by_name(cfg.curve);

    Rng client_rng(cfg.client_seed);
    Rng server_rng(cfg.server_seed);
    Channel channel(cfg.channel);
    Clock clock(cfg.clock, cfg.clock_start_ms);
    const std::uint64_t hop = 1 + cfg.channel.delay_ms;

    ServerKey key = cfg.server_key ? *cfg.server_key : ServerKey::generate(server_rng, curve);
    if (!same_curve(key.curve(), curve)) {
        throw Error(Errc::config, "server key is for " + key.curve().name + ", run is on " + curve.name);
    }

    SmartCard card = [&] {
        if (cfg.card) return *cfg.card;
        const ClientRegistration reg = client_register_request(cfg.credentials, curve, client_rng);
        return client_finalize_card(server_register(reg.request, key), cfg.credentials, reg.a);
    }();
    if (!same_curve(card.pub.curve(), curve)) {
        throw Error(Errc::config, "smart card is for " + card.pub.curve().name + ", run is on " + curve.name);
    }

    SessionRecord record{cfg, key, card, Transcript{}, Outcome{}, std::nullopt, std::nullopt};
    record.config.session_id = cfg.session_id.empty() ? derive_session_id(cfg) : cfg.session_id;
    record.transcript.session_id = record.config.session_id;
    record.transcript.curve = curve.name;
    SessionTaps taps;
    auto& events = record.transcript.events;

    auto finish = [&](Outcome outcome) {
        record.outcome = std::move(outcome);
        if (cfg.unsafe_taps) record.taps = taps;
        return record;
    };

    // login, client side
    std::optional<ClientLogin> login;
    try {
        login = client_login_begin(card, cfg.credentials, clock.now(), client_rng);
    } catch (const Error& err) {
        return finish(aborted(Party::client, err));
    }
    taps.client_id = login->session.id;
    taps.client_r_c = scalar_to_block(login->session.r_c);

    const Bytes request_bytes = login->request.encode();
    events.push_back({Direction::client_to_server, MessageKind::login_request, Stage::sent, request_bytes, clock.now()});
    std::optional<Bytes> delivered_request = channel.transmit(request_bytes);
    clock.advance(hop);
    if (!delivered_request) {
        return finish(Outcome{false, Party::channel, std::nullopt, "login request dropped"});
    }
    events.push_back({Direction::client_to_server, MessageKind::login_request, Stage::delivered, *delivered_request,
                      clock.now()});

    auto serve = [&](const Bytes& wire) {
        const LoginRequest req = LoginRequest::decode(curve, wire);
        return server_handle_login(req, key, clock.now(), cfg.window, server_rng);
    };

    auto replay = [&] {
        if (!cfg.channel.replay) return;
        clock.advance(hop);
        events.push_back({Direction::client_to_server, MessageKind::login_request, Stage::replayed,
                          *delivered_request, clock.now()});
        try {
            const ServerSession again = serve(*delivered_request);
            const Bytes reply = again.response.encode();
            events.push_back(
                {Direction::server_to_client, MessageKind::login_response, Stage::replay_reply, reply, clock.now()});
            taps.replay_server_sk = again.key;
            record.replay_outcome = Outcome{true, std::nullopt, std::nullopt, {}};
        } catch (const Error& err) {
            record.replay_outcome = aborted(Party::server, err);
        }
    };

    // login, server side
    std::optional<ServerSession> server;
    try {
        server = serve(*delivered_request);
    } catch (const Error& err) {
        replay();
        return finish(aborted(Party::server, err));
    }
    taps.server_sk = server->key;
    taps.honest = honest_from(*server);

    const Bytes response_bytes = server->response.encode();
    events.push_back(
        {Direction::server_to_client, MessageKind::login_response, Stage::sent, response_bytes, clock.now()});
    std::optional<Bytes> delivered_response = channel.transmit(response_bytes);
    clock.advance(hop);
    if (!delivered_response) {
        replay();
        return finish(Outcome{false, Party::channel, std::nullopt, "login response dropped"});
    }
    events.push_back({Direction::server_to_client, MessageKind::login_response, Stage::delivered,
                      *delivered_response, clock.now()});

    // login, client completion
    Outcome outcome{true, std::nullopt, std::nullopt, {}};
    try {
        const LoginResponse resp = LoginResponse::decode(*delivered_response);
        taps.client_sk = client_complete(login->session, resp, clock.now(), cfg.window);
    } catch (const Error& err) {
        outcome = aborted(Party::client, err);
    }
    replay();
    return finish(std::move(outcome));
}

}  // namespace pfs
