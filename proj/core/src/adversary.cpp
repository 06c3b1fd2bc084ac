#include "pfs/adversary.hpp"

#include "pfs/error.hpp"

namespace pfs {

namespace {

const Bytes* find_delivered(const Transcript& t, MessageKind kind) {
    for (const auto& ev : t.events) {
        if (ev.kind == kind && ev.stage == Stage::delivered) return &ev.payload;
    }
    return nullptr;
}

const Bytes& first_delivered(const Transcript& t, MessageKind kind) {
    if (const Bytes* found = find_delivered(t, kind)) return *found;
    throw Error(Errc::parse, "transcript " + t.session_id + " has no delivered " + std::string(to_string(kind)));
}

class Chain {
public:
    Chain(RecoveredSession& out) : out_(out) {}

    void record(std::string name, std::string formula, std::vector<std::pair<std::string, std::string>> inputs,
                std::string output) {
        out_.steps.push_back(AttackStep{static_cast<int>(out_.steps.size()) + 1, std::move(name), std::move(formula),
                                        std::move(inputs), std::move(output)});
    }

    int next_step() const { return static_cast<int>(out_.steps.size()) + 1; }

private:
    RecoveredSession& out_;
};

std::string ts_hex(Timestamp t) { return to_hex(t.encode()); }

}  // namespace

std::string_view to_string(Direction d) noexcept {
    return d == Direction::client_to_server ? "C→S" : "S→C";
}

std::string_view to_string(MessageKind k) noexcept {
    return k == MessageKind::login_request ? "LoginRequest" : "LoginResponse";
}

std::string_view to_string(Stage s) noexcept {
    switch (s) {
        case Stage::sent: return "sent";
        case Stage::delivered: return "delivered";
        case Stage::replayed: return "replayed";
        case Stage::replay_reply: return "replay-reply";
    }
    return "unknown";
}

std::string WireEvent::message_name() const {
    return std::string(to_string(kind)) + "." + std::string(to_string(stage));
}

const Bytes& Transcript::request() const { return first_delivered(*this, MessageKind::login_request); }
const Bytes& Transcript::response() const { return first_delivered(*this, MessageKind::login_response); }

RecoveredSession trace_attack(const Transcript& transcript, const Scalar& s) {
    const CurveParams& curve = curve_by_name(transcript.curve);
    if (!same_curve(curve, s.curve())) {
        throw Error(Errc::invalid_input, "key is for " + s.curve().name + ", transcript is " + curve.name);
    }
    const Bytes& wire = transcript.request();
    if (wire.size() != LoginRequest::wire_size(curve)) {
        throw Error(Errc::parse, "login request must be " + std::to_string(LoginRequest::wire_size(curve)) +
                                     " bytes, got " + std::to_string(wire.size()));
    }
    const std::size_t point_len = 2 * curve.field_bytes() + 1;
    const ByteView tail = ByteView(wire).subspan(point_len);
    const Block32 pid = Block32::from(tail.subspan(0, kBlockSize));
    const Block32 n_c = Block32::from(tail.subspan(2 * kBlockSize, kBlockSize));
    const Timestamp t_c = Timestamp::decode(tail.subspan(3 * kBlockSize));

    const Bytes* response_wire = find_delivered(transcript, MessageKind::login_response);
    if (response_wire && response_wire->size() != LoginResponse::kWireSize) {
        throw Error(Errc::parse, "login response must be " + std::to_string(LoginResponse::kWireSize) +
                                     " bytes, got " + std::to_string(response_wire->size()));
    }

    RecoveredSession out;
    out.session_id = transcript.session_id;
    out.curve = transcript.curve;
    Chain chain(out);
    const Block32 s_block = scalar_to_block(s);

    try {
        const Point m_c = point_decode(curve, ByteView(wire).first(point_len));
        const Point unmasked = point_mul(scalar_invert(s), m_c);
        const Block32 id = xor32(pid, point_mask(unmasked));
        out.id = id;
        chain.record("ID_c", "PID_c xor h(encode(s^-1 * M_c))",
                     {{"PID_c", pid.hex()}, {"M_c", to_hex(point_encode(m_c))}, {"s", s_block.hex()},
                      {"s^-1 * M_c", to_hex(point_encode(unmasked))}},
                     id.hex());

        const Block32 g = hash_fields({id, s_block});
        out.g = g;
        chain.record("G_c", "h(ID_c || s)", {{"ID_c", id.hex()}, {"s", s_block.hex()}}, g.hex());

        const Digest e = hash_fields({g, id});
        out.e = e;
        chain.record("E_c", "h(G_c || ID_c)", {{"G_c", g.hex()}, {"ID_c", id.hex()}}, e.hex());

        const Block32 r_c_block = xor32(n_c, hash_fields({e, t_c}));
        block_to_scalar(r_c_block, curve);
        out.r_c = r_c_block;
        chain.record("r_c", "N_c xor h(E_c || t_c)", {{"N_c", n_c.hex()}, {"E_c", e.hex()}, {"t_c", ts_hex(t_c)}},
                     r_c_block.hex());

        if (response_wire == nullptr) {
            throw Error(Errc::parse, "transcript has no delivered LoginResponse");
        }
        const LoginResponse resp = LoginResponse::decode(*response_wire);
        const Block32 r_s_block = xor32(resp.o, r_c_block);
        block_to_scalar(r_s_block, curve);
        out.r_s = r_s_block;
        chain.record("r_s", "O_s xor r_c", {{"O_s", resp.o.hex()}, {"r_c", r_c_block.hex()}}, r_s_block.hex());

        const Digest sk = hash_fields({g, r_c_block, r_s_block, t_c, resp.t});
        out.sk = SessionKey{sk};
        chain.record("SK", "h(G_c || r_c || r_s || t_c || t_s)",
                     {{"G_c", g.hex()},
                      {"r_c", r_c_block.hex()},
                      {"r_s", r_s_block.hex()},
                      {"t_c", ts_hex(t_c)},
                      {"t_s", ts_hex(resp.t)}},
                     sk.hex());
    } catch (const Error& err) {
        out.failure = AttackFailure{chain.next_step(), err.what()};
    }
    return out;
}

RecoveredSession pfs_attack(const Transcript& transcript, const Scalar& s) {
    transcript.response();
    RecoveredSession out = trace_attack(transcript, s);
    if (out.failure) {
        throw AttackStepError(out.failure->step, out.failure->reason);
    }
    return out;
}

BreakVerdict verify_break(const RecoveredSession& recovered, const SessionKey& truth) {
    if (recovered.complete() && *recovered.sk == truth) return {true, std::nullopt};
    return {false, std::nullopt};
}

BreakVerdict verify_break(const RecoveredSession& recovered, const HonestTaps& truth) {
    if (recovered.complete() && *recovered.sk == truth.sk) return {true, std::nullopt};

    const std::optional<Block32> got[] = {
        recovered.id, recovered.g, recovered.e, recovered.r_c, recovered.r_s,
        recovered.sk ? std::optional<Block32>(recovered.sk->sk) : std::nullopt,
    };
    const Block32 want[] = {truth.id, truth.g, truth.e, truth.r_c, truth.r_s, truth.sk.sk};
    for (int i = 0; i < kAttackSteps; ++i) {
        if (!got[i] || *got[i] != want[i]) return {false, i + 1};
    }
    return {false, kAttackSteps};
}

}  // namespace pfs
