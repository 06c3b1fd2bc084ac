#pragma once

#include <chrono>
#include <string>

#include "pfs/codec.hpp"
#include "pfs/group.hpp"

namespace pfs {

using Millis = std::chrono::milliseconds;

inline constexpr Millis kDefaultFreshnessWindow{2000};

/// Raw client inputs. Each one is hashed to a 32-byte block before it enters a formula.
struct ClientSecrets {
    std::string identity;
    std::string password;
    Bytes biometric;

    Block32 id() const;
    Block32 pw() const;
    Block32 bio() const;
};

/// Server long-term key pair: s and Pub = s*P.
class ServerKey {
public:
    /// Throws Error(invalid_input) for a zero secret.
    explicit ServerKey(Scalar secret);

    static ServerKey generate(Rng& rng, const CurveParams& curve);

    const Scalar& secret() const noexcept { return secret_; }
    const Point& pub() const noexcept { return pub_; }
    const CurveParams& curve() const noexcept { return secret_.curve(); }

private:
    Scalar secret_;
    Point pub_;
};

// Registration (secure channel, never serialized to a transcript).

struct RegistrationRequest {
    Block32 id;
    Digest pw_prime;
};

struct ClientRegistration {
    RegistrationRequest request;
    Scalar a;  // kept client-side until the card is finalized
};

struct PartialCard {
    Block32 h;
    Digest e;
    Point pub;
};

/// [H_c, E_c, Z_c, Pub]
struct SmartCard {
    Block32 h;
    Digest e;
    Block32 z;
    Point pub;

    friend bool operator==(const SmartCard&, const SmartCard&) = default;
};

ClientRegistration client_register_request(const ClientSecrets& secrets, const CurveParams& curve, Rng& rng);

/// The server keeps nothing: G_c = h(ID_c || s) can always be recomputed from s.
PartialCard server_register(const RegistrationRequest& request, const ServerKey& key);

SmartCard client_finalize_card(const PartialCard& partial, const ClientSecrets& secrets, const Scalar& a);

// Login and authentication (public channel).

/// {M_c, PID_c, Auth_c, N_c, t_c}
struct LoginRequest {
    Point m;
    Block32 pid;
    Digest auth;
    Block32 n;
    Timestamp t;

    /// point_encode(M_c) || PID_c || Auth_c || N_c || t_c
    Bytes encode() const;
    /// Throws Error(parse) on a wrong length or an invalid point.
    static LoginRequest decode(const CurveParams& curve, ByteView wire);
    static std::size_t wire_size(const CurveParams& curve);

    friend bool operator==(const LoginRequest&, const LoginRequest&) = default;
};

/// {O_s, Auth_s, t_s}
struct LoginResponse {
    Block32 o;
    Digest auth;
    Timestamp t;

    /// O_s || Auth_s || t_s
    Bytes encode() const;
    static LoginResponse decode(ByteView wire);
    static constexpr std::size_t kWireSize = 2 * kBlockSize + kTimestampSize;

    friend bool operator==(const LoginResponse&, const LoginResponse&) = default;
};

struct SessionKey {
    Digest sk;

    friend bool operator==(const SessionKey&, const SessionKey&) = default;
};

/// What the client keeps between sending the request and receiving the response.
struct ClientSession {
    Block32 id;
    Block32 g;  // G'_c recovered from the card
    Digest e;
    Scalar r_c;
    Timestamp t_c;
};

struct ClientLogin {
    LoginRequest request;
    ClientSession session;
};

/// Server view of one accepted login, including everything it unmasked.
struct ServerSession {
    LoginResponse response;
    SessionKey key;
    Block32 id;
    Block32 g;
    Digest e;
    Scalar r_c;
    Scalar r_s;
};

/// True when now - sent > window. A negative difference (sent in the future) is fresh.
bool is_stale(Timestamp sent, Timestamp now, Millis window) noexcept;

/// Recovers a from Z_c, checks E'_c against the card, then builds the request.
/// Throws Error(local_verification_failed) before drawing any randomness when the
/// password or biometric is wrong.
ClientLogin client_login_begin(const SmartCard& card, const ClientSecrets& secrets, Timestamp t_c, Rng& rng);

/// Throws Error(stale_timestamp), Error(parse) if N_c unmasks to a value >= n, or
/// Error(auth_mismatch) if Auth_c does not verify.
ServerSession server_handle_login(const LoginRequest& request, const ServerKey& key, Timestamp t_s, Millis window,
                                  Rng& rng);

/// Throws Error(stale_timestamp), Error(parse) if O_s unmasks to a value >= n, or
/// Error(auth_mismatch) if Auth_s does not verify.
SessionKey client_complete(const ClientSession& session, const LoginResponse& response, Timestamp t_k, Millis window);

}  // namespace pfs
