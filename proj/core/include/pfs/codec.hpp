#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "pfs/bytes.hpp"
#include "pfs/group.hpp"

namespace pfs {

inline constexpr std::size_t kBlockSize = 32;
inline constexpr std::size_t kTimestampSize = 8;

/// Fixed 32-byte operand. Every XOR and every concatenated hash field in the protocol
/// (digests, scalar encodings, masked values, pre-hashed credentials) is one of these.
struct Block32 {
    std::array<std::uint8_t, kBlockSize> bytes{};

    /// Throws Error(invalid_input) unless exactly 32 bytes.
    static Block32 from(ByteView raw);
    static Block32 from_hex(std::string_view hex);

    ByteView view() const noexcept { return bytes; }
    std::string hex() const { return to_hex(bytes); }

    friend bool operator==(const Block32&, const Block32&) = default;
};

/// Output of h(.); same width as every other operand.
using Digest = Block32;

/// Milliseconds since the epoch; 8 big-endian bytes inside hash inputs.
struct Timestamp {
    std::uint64_t ms = 0;

    std::array<std::uint8_t, kTimestampSize> encode() const noexcept;
    static Timestamp decode(ByteView raw);

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// SHA-256.
Digest hash(ByteView input);

Block32 xor32(const Block32& a, const Block32& b);

/// Raw-byte variant; throws Error(invalid_input) unless both operands are 32 bytes.
Block32 xor32(ByteView a, ByteView b);

/// Big-endian, zero-padded to 32 bytes.
Block32 scalar_to_block(const Scalar& k);

/// Throws Error(parse) when the block's value is >= n.
Scalar block_to_scalar(const Block32& block, const CurveParams& curve);

/// hash(point_encode(Q)): a 32-byte pad derived from a point, identical on any curve.
/// Throws Error(encoding) for the identity.
Block32 point_mask(const Point& q);

/// One position of a hash-input schema.
using Field = std::variant<Block32, Timestamp>;

/// Plain concatenation of fixed-width fields.
Bytes concat(std::span<const Field> parts);
Bytes concat(std::initializer_list<Field> parts);

/// Raw-byte variant; throws Error(invalid_input) for any part that is not 32 or 8 bytes.
Bytes concat(std::span<const ByteView> parts);

/// hash(concat(parts)). All protocol hashing goes through here so the field schema
/// can be observed by an installed HashAudit.
Digest hash_fields(std::initializer_list<Field> parts);

/// Receives the field list of every hash_fields call on the installing thread.
using HashAudit = std::function<void(std::span<const Field>)>;

/// Installs an audit hook for the current thread for the lifetime of the object.
class ScopedHashAudit {
public:
    explicit ScopedHashAudit(HashAudit audit);
    ~ScopedHashAudit();
    ScopedHashAudit(const ScopedHashAudit&) = delete;
    ScopedHashAudit& operator=(const ScopedHashAudit&) = delete;

private:
    HashAudit previous_;
};

}  // namespace pfs
