#include "pfs/group.hpp"

#include <boost/multiprecision/miller_rabin.hpp>

#include "pfs/error.hpp"

namespace pfs {

namespace {

BigInt mod(const BigInt& value, const BigInt& m) {
    BigInt r = value % m;
    if (r < 0) r += m;
    return r;
}

BigInt inverse_mod(const BigInt& value, const BigInt& m) {
    BigInt inv;
    const BigInt reduced = mod(value, m);
    if (mpz_invert(inv.backend().data(), reduced.backend().data(), m.backend().data()) == 0) {
        throw Error(Errc::invalid_input, "value has no inverse modulo " + m.str());
    }
    return inv;
}

void require_same_curve(const CurveParams& lhs, const CurveParams& rhs) {
    if (!same_curve(lhs, rhs)) {
        throw Error(Errc::invalid_input, "operands on different curves: " + lhs.name + " vs " + rhs.name);
    }
}

CurveParams make_toy17() {
    CurveParams c;
    c.name = "toy17";
    c.p = 17;
    c.a = 2;
    c.b = 2;
    c.g = {5, 1};
    c.n = 19;
    return c;
}

CurveParams make_std256() {
    CurveParams c;
    c.name = "std256";
    c.p = BigInt("0xffffffff00000001000000000000000000000000ffffffffffffffffffffffff");
    c.a = c.p - 3;
    c.b = BigInt("0x5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b");
    c.g = {BigInt("0x6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296"),
           BigInt("0x4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5")};
    c.n = BigInt("0xffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551");
    return c;
}

}  // namespace

std::size_t CurveParams::field_bytes() const {
    return (boost::multiprecision::msb(p) + 1 + 7) / 8;
}

const CurveParams& toy17() {
    static const CurveParams curve = [] {
        auto c = make_toy17();
        validate_curve(c);
        return c;
    }();
    return curve;
}

const CurveParams& std256() {
    static const CurveParams curve = [] {
        auto c = make_std256();
        validate_curve(c);
        return c;
    }();
    return curve;
}

const CurveParams& curve_by_name(std::string_view name) {
    if (name == "toy17") return toy17();
    if (name == "std256") return std256();
    throw Error(Errc::config, "unknown curve '" + std::string(name) + "' (expected toy17 or std256)");
}

bool same_curve(const CurveParams& lhs, const CurveParams& rhs) noexcept {
    return &lhs == &rhs || (lhs.name == rhs.name && lhs.p == rhs.p && lhs.n == rhs.n);
}

void validate_curve(const CurveParams& curve) {
    const BigInt& p = curve.p;
    if (mod(4 * curve.a * curve.a * curve.a + 27 * curve.b * curve.b, p) == 0) {
        throw Error(Errc::invalid_input, curve.name + ": singular curve");
    }
    if (!on_curve(curve, curve.g.x, curve.g.y)) {
        throw Error(Errc::invalid_input, curve.name + ": base point not on curve");
    }
    Rng rng(0x5eed);
    if (curve.n < 2 || !boost::multiprecision::miller_rabin_test(curve.n, 25, rng)) {
        throw Error(Errc::invalid_input, curve.name + ": group order is not prime");
    }
    // n*G computed as (n-1)*G + G so the scalar stays inside [0, n-1].
    const Point g = Point::generator(curve);
    const Point almost = point_mul(Scalar(curve, curve.n - 1), g);
    if (!point_add(almost, g).is_identity()) {
        throw Error(Errc::invalid_input, curve.name + ": n*G is not the identity");
    }
}

Scalar::Scalar(const CurveParams& curve, BigInt value) : curve_(&curve), value_(std::move(value)) {
    if (value_ < 0 || value_ >= curve.n) {
        throw Error(Errc::invalid_input, "scalar out of range [0, n-1]");
    }
}

Scalar Scalar::reduce(const CurveParams& curve, const BigInt& value) {
    return Scalar(curve, mod(value, curve.n));
}

Scalar operator*(const Scalar& lhs, const Scalar& rhs) {
    require_same_curve(lhs.curve(), rhs.curve());
    return Scalar::reduce(lhs.curve(), lhs.value_ * rhs.value_);
}

Scalar operator+(const Scalar& lhs, const Scalar& rhs) {
    require_same_curve(lhs.curve(), rhs.curve());
    return Scalar::reduce(lhs.curve(), lhs.value_ + rhs.value_);
}

bool operator==(const Scalar& lhs, const Scalar& rhs) {
    return same_curve(lhs.curve(), rhs.curve()) && lhs.value_ == rhs.value_;
}

Scalar scalar_random(Rng& rng, const CurveParams& curve) {
    const unsigned bits = boost::multiprecision::msb(curve.n) + 1;
    const std::size_t width = (bits + 7) / 8;
    const unsigned top_bits = bits - 8 * static_cast<unsigned>(width - 1);
    const auto top_mask = static_cast<std::uint8_t>((1u << top_bits) - 1);

    Bytes buf(width);
    for (;;) {
        for (std::size_t i = 0; i < width; i += 8) {
            std::uint64_t word = rng();
            for (std::size_t j = i; j < width && j < i + 8; ++j) {
                buf[j] = static_cast<std::uint8_t>(word & 0xff);
                word >>= 8;
            }
        }
        buf[0] &= top_mask;
        BigInt candidate = bigint_from_bytes(buf);
        if (candidate != 0 && candidate < curve.n) {
            return Scalar(curve, std::move(candidate));
        }
    }
}

Scalar scalar_invert(const Scalar& s) {
    if (s.is_zero()) {
        throw Error(Errc::invalid_input, "cannot invert the zero scalar");
    }
    return Scalar(s.curve(), inverse_mod(s.value(), s.curve().n));
}

Point::Point(const CurveParams& curve, std::optional<AffineCoords> coords)
    : curve_(&curve), coords_(std::move(coords)) {}

Point Point::identity(const CurveParams& curve) { return Point(curve, std::nullopt); }

Point Point::generator(const CurveParams& curve) { return affine(curve, curve.g.x, curve.g.y); }

Point Point::affine(const CurveParams& curve, BigInt x, BigInt y) {
    if (x < 0 || x >= curve.p || y < 0 || y >= curve.p || !on_curve(curve, x, y)) {
        throw Error(Errc::invalid_input, "point (" + x.str() + ", " + y.str() + ") is not on " + curve.name);
    }
    return Point(curve, AffineCoords{std::move(x), std::move(y)});
}

const AffineCoords& Point::coords() const {
    if (!coords_) {
        throw Error(Errc::invalid_input, "identity has no affine coordinates");
    }
    return *coords_;
}

Point Point::operator-() const {
    if (!coords_) return *this;
    return Point(*curve_, AffineCoords{coords_->x, mod(-coords_->y, curve_->p)});
}

bool operator==(const Point& lhs, const Point& rhs) {
    return same_curve(*lhs.curve_, *rhs.curve_) && lhs.coords_ == rhs.coords_;
}

bool on_curve(const CurveParams& curve, const BigInt& x, const BigInt& y) {
    const BigInt& p = curve.p;
    return mod(y * y - (x * x * x + curve.a * x + curve.b), p) == 0;
}

Point point_add(const Point& lhs, const Point& rhs) {
    require_same_curve(lhs.curve(), rhs.curve());
    if (lhs.is_identity()) return rhs;
    if (rhs.is_identity()) return lhs;

    const CurveParams& c = lhs.curve();
    const BigInt& p = c.p;
    const auto& [x1, y1] = lhs.coords();
    const auto& [x2, y2] = rhs.coords();

    BigInt slope;
    if (x1 == x2) {
        if (mod(y1 + y2, p) == 0) {
            return Point::identity(c);
        }
        slope = mod((3 * x1 * x1 + c.a) * inverse_mod(2 * y1, p), p);
    } else {
        slope = mod((y2 - y1) * inverse_mod(x2 - x1, p), p);
    }
    BigInt x3 = mod(slope * slope - x1 - x2, p);
    BigInt y3 = mod(slope * (x1 - x3) - y1, p);
    return Point::affine(c, std::move(x3), std::move(y3));
}

Point point_mul(const Scalar& k, const Point& q) {
    require_same_curve(k.curve(), q.curve());
    Point acc = Point::identity(q.curve());
    if (k.is_zero() || q.is_identity()) return acc;

    const BigInt& bits = k.value();
    for (int i = static_cast<int>(boost::multiprecision::msb(bits)); i >= 0; --i) {
        acc = point_add(acc, acc);
        if (boost::multiprecision::bit_test(bits, static_cast<unsigned>(i))) {
            acc = point_add(acc, q);
        }
    }
    return acc;
}

Bytes bigint_to_bytes(const BigInt& value, std::size_t width) {
    if (value < 0) {
        throw Error(Errc::encoding, "negative integer");
    }
    const std::size_t needed = value == 0 ? 0 : (mpz_sizeinbase(value.backend().data(), 2) + 7) / 8;
    if (needed > width) {
        throw Error(Errc::encoding, "integer does not fit in " + std::to_string(width) + " bytes");
    }
    Bytes out(width, 0);
    std::size_t written = 0;
    if (needed > 0) {
        mpz_export(out.data() + (width - needed), &written, 1, 1, 1, 0, value.backend().data());
    }
    return out;
}

BigInt bigint_from_bytes(ByteView bytes) {
    BigInt out;
    if (!bytes.empty()) {
        mpz_import(out.backend().data(), bytes.size(), 1, 1, 1, 0, bytes.data());
    }
    return out;
}

Bytes point_encode(const Point& q) {
    if (q.is_identity()) {
        throw Error(Errc::encoding, "the identity point has no encoding");
    }
    const std::size_t w = q.curve().field_bytes();
    Bytes out;
    out.reserve(2 * w + 1);
    out.push_back(0x04);
    const Bytes x = bigint_to_bytes(q.coords().x, w);
    const Bytes y = bigint_to_bytes(q.coords().y, w);
    out.insert(out.end(), x.begin(), x.end());
    out.insert(out.end(), y.begin(), y.end());
    return out;
}

Point point_decode(const CurveParams& curve, ByteView bytes) {
    const std::size_t w = curve.field_bytes();
    if (bytes.size() != 2 * w + 1) {
        throw Error(Errc::parse, "point encoding must be " + std::to_string(2 * w + 1) + " bytes, got " +
                                     std::to_string(bytes.size()));
    }
    if (bytes[0] != 0x04) {
        throw Error(Errc::parse, "point encoding must start with 0x04");
    }
    BigInt x = bigint_from_bytes(bytes.subspan(1, w));
    BigInt y = bigint_from_bytes(bytes.subspan(1 + w, w));
    if (x >= curve.p || y >= curve.p || !on_curve(curve, x, y)) {
        throw Error(Errc::parse, "encoded point is not on " + curve.name);
    }
    return Point::affine(curve, std::move(x), std::move(y));
}

}  // namespace pfs
