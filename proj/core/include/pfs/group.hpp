#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

#include "pfs/bytes.hpp"

namespace pfs {

using BigInt = boost::multiprecision::mpz_int;

/// Every random draw in the library goes through this engine; its output sequence is
/// fixed by the standard, so seeded runs reproduce across platforms.
using Rng = std::mt19937_64;

struct AffineCoords {
    BigInt x;
    BigInt y;

    friend bool operator==(const AffineCoords&, const AffineCoords&) = default;
};

/// Short Weierstrass curve y^2 = x^3 + ax + b over F_p with a base point of prime order n.
struct CurveParams {
    std::string name;
    BigInt p;
    BigInt a;
    BigInt b;
    AffineCoords g;
    BigInt n;

    /// Bytes per coordinate in encodings: ceil(bits(p) / 8).
    std::size_t field_bytes() const;
};

/// y^2 = x^3 + 2x + 2 over F_17, G = (5,1), n = 19. Small enough for exhaustive checks.
const CurveParams& toy17();

/// NIST P-256.
const CurveParams& std256();

/// Looks up a preset ("toy17", "std256"); throws Error(config) for anything else.
const CurveParams& curve_by_name(std::string_view name);

/// Throws Error(invalid_input) unless the discriminant is nonzero, G is on the curve,
/// n is prime and n*G is the identity.
void validate_curve(const CurveParams& curve);

bool same_curve(const CurveParams& lhs, const CurveParams& rhs) noexcept;

/// Integer modulo the group order n of its curve.
class Scalar {
public:
    /// Throws Error(invalid_input) unless 0 <= value < n.
    Scalar(const CurveParams& curve, BigInt value);

    static Scalar reduce(const CurveParams& curve, const BigInt& value);

    const BigInt& value() const noexcept { return value_; }
    const CurveParams& curve() const noexcept { return *curve_; }
    bool is_zero() const noexcept { return value_ == 0; }

    friend Scalar operator*(const Scalar& lhs, const Scalar& rhs);
    friend Scalar operator+(const Scalar& lhs, const Scalar& rhs);
    friend bool operator==(const Scalar& lhs, const Scalar& rhs);

private:
    const CurveParams* curve_;
    BigInt value_;
};

/// Uniform in [1, n-1] by rejection sampling.
Scalar scalar_random(Rng& rng, const CurveParams& curve);

/// Inverse modulo n. Throws Error(invalid_input) for zero.
Scalar scalar_invert(const Scalar& s);

/// A curve point in affine coordinates, or the identity. Constructing an off-curve
/// point is impossible: Point::affine rejects it.
class Point {
public:
    static Point identity(const CurveParams& curve);
    static Point generator(const CurveParams& curve);

    /// Throws Error(invalid_input) if (x, y) is out of range or off the curve.
    static Point affine(const CurveParams& curve, BigInt x, BigInt y);

    bool is_identity() const noexcept { return !coords_.has_value(); }
    const AffineCoords& coords() const;
    const CurveParams& curve() const noexcept { return *curve_; }

    Point operator-() const;

    friend bool operator==(const Point& lhs, const Point& rhs);

private:
    Point(const CurveParams& curve, std::optional<AffineCoords> coords);

    const CurveParams* curve_;
    std::optional<AffineCoords> coords_;
};

bool on_curve(const CurveParams& curve, const BigInt& x, const BigInt& y);

Point point_add(const Point& lhs, const Point& rhs);

/// k*Q by double-and-add; the identity when k is zero.
Point point_mul(const Scalar& k, const Point& q);

/// 0x04 || X || Y, each coordinate big-endian and field_bytes() wide.
/// Throws Error(encoding) for the identity.
Bytes point_encode(const Point& q);

/// Inverse of point_encode. Throws Error(parse) on wrong length, prefix, or an off-curve point.
Point point_decode(const CurveParams& curve, ByteView bytes);

/// Big-endian, zero-padded to width bytes. Throws Error(encoding) if the value does not fit.
Bytes bigint_to_bytes(const BigInt& value, std::size_t width);
BigInt bigint_from_bytes(ByteView bytes);

}  // namespace pfs
