#include "pfs/codec.hpp"

#include <openssl/evp.h>

#include <vector>

#include "pfs/error.hpp"

namespace pfs {

namespace {

thread_local HashAudit current_audit;

void append(Bytes& out, const Field& field) {
    std::visit(
        [&out](const auto& value) {
            if constexpr (std::is_same_v<std::decay_t<decltype(value)>, Block32>) {
                out.insert(out.end(), value.bytes.begin(), value.bytes.end());
            } else {
                const auto enc = value.encode();
                out.insert(out.end(), enc.begin(), enc.end());
            }
        },
        field);
}

}  // namespace

Block32 Block32::from(ByteView raw) {
    if (raw.size() != kBlockSize) {
        throw Error(Errc::invalid_input, "expected 32 bytes, got " + std::to_string(raw.size()));
    }
    Block32 out;
    std::copy(raw.begin(), raw.end(), out.bytes.begin());
    return out;
}

Block32 Block32::from_hex(std::string_view hex) { return from(pfs::from_hex(hex)); }

std::array<std::uint8_t, kTimestampSize> Timestamp::encode() const noexcept {
    std::array<std::uint8_t, kTimestampSize> out{};
    for (std::size_t i = 0; i < kTimestampSize; ++i) {
        out[i] = static_cast<std::uint8_t>(ms >> (8 * (kTimestampSize - 1 - i)));
    }
    return out;
}

Timestamp Timestamp::decode(ByteView raw) {
    if (raw.size() != kTimestampSize) {
        throw Error(Errc::parse, "timestamp must be 8 bytes");
    }
    std::uint64_t ms = 0;
    for (auto b : raw) ms = (ms << 8) | b;
    return Timestamp{ms};
}

Digest hash(ByteView input) {
    Digest out;
    unsigned int len = 0;
    if (EVP_Digest(input.data(), input.size(), out.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != kBlockSize) {
        throw std::runtime_error("EVP_Digest(SHA-256) failed");
    }
    return out;
}

Block32 xor32(const Block32& a, const Block32& b) {
    Block32 out;
    for (std::size_t i = 0; i < kBlockSize; ++i) out.bytes[i] = a.bytes[i] ^ b.bytes[i];
    return out;
}

Block32 xor32(ByteView a, ByteView b) {
    if (a.size() != kBlockSize || b.size() != kBlockSize) {
        throw Error(Errc::invalid_input, "xor32 operands must both be 32 bytes (got " + std::to_string(a.size()) +
                                             " and " + std::to_string(b.size()) + ")");
    }
    return xor32(Block32::from(a), Block32::from(b));
}

Block32 scalar_to_block(const Scalar& k) { return Block32::from(bigint_to_bytes(k.value(), kBlockSize)); }

Scalar block_to_scalar(const Block32& block, const CurveParams& curve) {
    BigInt value = bigint_from_bytes(block.bytes);
    if (value >= curve.n) {
        throw Error(Errc::parse, "block value is not below the group order of " + curve.name);
    }
    return Scalar(curve, std::move(value));
}

Block32 point_mask(const Point& q) { return hash(point_encode(q)); }

Bytes concat(std::span<const Field> parts) {
    Bytes out;
    out.reserve(parts.size() * kBlockSize);
    for (const auto& part : parts) append(out, part);
    return out;
}

Bytes concat(std::initializer_list<Field> parts) { return concat(std::span<const Field>(parts.begin(), parts.size())); }

Bytes concat(std::span<const ByteView> parts) {
    Bytes out;
    for (const auto& part : parts) {
        if (part.size() != kBlockSize && part.size() != kTimestampSize) {
            throw Error(Errc::invalid_input,
                        "concat part of " + std::to_string(part.size()) + " bytes is not a fixed-width field");
        }
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

Digest hash_fields(std::initializer_list<Field> parts) {
    const std::span<const Field> view(parts.begin(), parts.size());
    if (current_audit) current_audit(view);
    return hash(concat(view));
}

ScopedHashAudit::ScopedHashAudit(HashAudit audit) : previous_(std::move(current_audit)) {
    current_audit = std::move(audit);
}

ScopedHashAudit::~ScopedHashAudit() { current_audit = std::move(previous_); }

}  // namespace pfs
