#include "pfs/protocol.hpp"

#include <string_view>

#include "pfs/error.hpp"

namespace pfs {

namespace {

Block32 hash_text(std::string_view text) {
    return hash(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// h(ID_c || (PW_c xor B_c)), the pad hiding a inside Z_c
Digest registration_pad(const ClientSecrets& secrets) {
    return hash_fields({secrets.id(), xor32(secrets.pw(), secrets.bio())});
}

// h(ID_c || PW_c || a || B_c)
Digest masked_password(const ClientSecrets& secrets, const Scalar& a) {
    return hash_fields({secrets.id(), secrets.pw(), scalar_to_block(a), secrets.bio()});
}

Block32 server_secret_g(const Block32& id, const Scalar& s) { return hash_fields({id, scalar_to_block(s)}); }

Digest card_check(const Block32& g, const Block32& id) { return hash_fields({g, id}); }

Digest client_auth(const Block32& id, const Block32& g, const Scalar& r_c, Timestamp t_c) {
    return hash_fields({id, g, scalar_to_block(r_c), t_c});
}

Digest session_key(const Block32& g, const Scalar& r_c, const Scalar& r_s, Timestamp t_c, Timestamp t_s) {
    return hash_fields({g, scalar_to_block(r_c), scalar_to_block(r_s), t_c, t_s});
}

Digest server_auth(const Digest& sk, const Digest& e, const Block32& id) { return hash_fields({sk, e, id}); }

void check_fresh(Timestamp sent, Timestamp now, Millis window, std::string_view what) {
    if (is_stale(sent, now, window)) {
        throw Error(Errc::stale_timestamp, std::string(what) + " is " + std::to_string(now.ms - sent.ms) +
                                               " ms old, window is " + std::to_string(window.count()) + " ms");
    }
}

}  // namespace

Block32 ClientSecrets::id() const { return hash_text(identity); }
Block32 ClientSecrets::pw() const { return hash_text(password); }
Block32 ClientSecrets::bio() const { return hash(biometric); }

ServerKey::ServerKey(Scalar secret)
    : secret_(std::move(secret)), pub_(Point::identity(secret_.curve())) {
    if (secret_.is_zero()) {
        throw Error(Errc::invalid_input, "server secret must be nonzero");
    }
    pub_ = point_mul(secret_, Point::generator(secret_.curve()));
}

ServerKey ServerKey::generate(Rng& rng, const CurveParams& curve) { return ServerKey(scalar_random(rng, curve)); }

ClientRegistration client_register_request(const ClientSecrets& secrets, const CurveParams& curve, Rng& rng) {
    Scalar a = scalar_random(rng, curve);
    RegistrationRequest request{secrets.id(), masked_password(secrets, a)};
    return {request, std::move(a)};
}

PartialCard server_register(const RegistrationRequest& request, const ServerKey& key) {
    const Block32 g = server_secret_g(request.id, key.secret());
    return PartialCard{xor32(g, request.pw_prime), card_check(g, request.id), key.pub()};
}

SmartCard client_finalize_card(const PartialCard& partial, const ClientSecrets& secrets, const Scalar& a) {
    return SmartCard{partial.h, partial.e, xor32(registration_pad(secrets), scalar_to_block(a)), partial.pub};
}

Bytes LoginRequest::encode() const {
    Bytes out = point_encode(m);
    const std::array<Field, 4> tail{pid, auth, n, t};
    const Bytes rest = concat(std::span<const Field>(tail));
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

std::size_t LoginRequest::wire_size(const CurveParams& curve) {
    return 2 * curve.field_bytes() + 1 + 3 * kBlockSize + kTimestampSize;
}

LoginRequest LoginRequest::decode(const CurveParams& curve, ByteView wire) {
    if (wire.size() != wire_size(curve)) {
        throw Error(Errc::parse, "login request must be " + std::to_string(wire_size(curve)) + " bytes, got " +
                                     std::to_string(wire.size()));
    }
    const std::size_t point_len = 2 * curve.field_bytes() + 1;
    auto rest = wire.subspan(point_len);
    return LoginRequest{
        point_decode(curve, wire.first(point_len)),
        Block32::from(rest.subspan(0, kBlockSize)),
        Block32::from(rest.subspan(kBlockSize, kBlockSize)),
        Block32::from(rest.subspan(2 * kBlockSize, kBlockSize)),
        Timestamp::decode(rest.subspan(3 * kBlockSize)),
    };
}

Bytes LoginResponse::encode() const { return concat({o, auth, t}); }

LoginResponse LoginResponse::decode(ByteView wire) {
    if (wire.size() != kWireSize) {
        throw Error(Errc::parse, "login response must be " + std::to_string(kWireSize) + " bytes, got " +
                                     std::to_string(wire.size()));
    }
    return LoginResponse{
        Block32::from(wire.subspan(0, kBlockSize)),
        Block32::from(wire.subspan(kBlockSize, kBlockSize)),
        Timestamp::decode(wire.subspan(2 * kBlockSize)),
    };
}

bool is_stale(Timestamp sent, Timestamp now, Millis window) noexcept {
    return now.ms > sent.ms && now.ms - sent.ms > static_cast<std::uint64_t>(window.count());
}

ClientLogin client_login_begin(const SmartCard& card, const ClientSecrets& secrets, Timestamp t_c, Rng& rng) {
    const CurveParams& curve = card.pub.curve();
    const Block32 id = secrets.id();

    // Z_c only hides a when PW_c and B_c are right; a wrong value of a surfaces below
    // as an E'_c mismatch, or here if the unmasked block is not a valid scalar.
    const Block32 a_block = xor32(card.z, registration_pad(secrets));
    const BigInt a_value = bigint_from_bytes(a_block.bytes);
    if (a_value >= curve.n) {
        throw Error(Errc::local_verification_failed, "smart card rejected the credentials");
    }
    const Scalar a(curve, a_value);
    const Block32 g = xor32(card.h, masked_password(secrets, a));
    if (card_check(g, id) != card.e) {
        throw Error(Errc::local_verification_failed, "smart card rejected the credentials");
    }

    Scalar r_c = scalar_random(rng, curve);
    const Point m = point_mul(r_c, card.pub);
    const Point r_p = point_mul(r_c, Point::generator(curve));

    LoginRequest request{
        m,
        xor32(id, point_mask(r_p)),
        client_auth(id, g, r_c, t_c),
        xor32(scalar_to_block(r_c), hash_fields({card.e, t_c})),
        t_c,
    };
    return ClientLogin{std::move(request), ClientSession{id, g, card.e, std::move(r_c), t_c}};
}

ServerSession server_handle_login(const LoginRequest& request, const ServerKey& key, Timestamp t_s, Millis window,
                                  Rng& rng) {
    check_fresh(request.t, t_s, window, "login request");
    const CurveParams& curve = key.curve();

    const Point r_p = point_mul(scalar_invert(key.secret()), request.m);
    const Block32 id = xor32(request.pid, point_mask(r_p));
    const Block32 g = server_secret_g(id, key.secret());
    const Digest e = card_check(g, id);
    Scalar r_c = block_to_scalar(xor32(request.n, hash_fields({e, request.t})), curve);

    if (client_auth(id, g, r_c, request.t) != request.auth) {
        throw Error(Errc::auth_mismatch, "Auth_c does not verify");
    }

    Scalar r_s = scalar_random(rng, curve);
    const Digest sk = session_key(g, r_c, r_s, request.t, t_s);
    LoginResponse response{
        xor32(scalar_to_block(r_s), scalar_to_block(r_c)),
        server_auth(sk, e, id),
        t_s,
    };
    return ServerSession{response, SessionKey{sk}, id, g, e, std::move(r_c), std::move(r_s)};
}

SessionKey client_complete(const ClientSession& session, const LoginResponse& response, Timestamp t_k, Millis window) {
    check_fresh(response.t, t_k, window, "login response");
    const Scalar r_s = block_to_scalar(xor32(response.o, scalar_to_block(session.r_c)), session.r_c.curve());
    const Digest sk = session_key(session.g, session.r_c, r_s, session.t_c, response.t);
    if (server_auth(sk, session.e, session.id) != response.auth) {
        throw Error(Errc::auth_mismatch, "Auth_s does not verify");
    }
    return SessionKey{sk};
}

}  // namespace pfs
