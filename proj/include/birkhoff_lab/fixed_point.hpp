#pragma once

// Binary fixed-point arithmetic on the circle T = R/Z.
//
// Every point is an integer multiple of 2^-127 stored in an unsigned 128-bit
// word. Addition wraps modulo 1 by masking, so orbits x + k*alpha are exact
// for the stored alpha, and the full circle (length 1 = 2^127) still fits in
// the word, which keeps lengths and measures in the same type.

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "birkhoff_lab/error.hpp"

namespace birkhoff_lab {

using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr int kFracBits = 127;
inline constexpr u128 kOne = u128{1} << kFracBits;
inline constexpr u128 kMask = kOne - 1;

/// raw / 2^127 as long double; raw may equal kOne.
inline long double fraction_to_long_double(u128 raw) {
    auto hi = static_cast<std::uint64_t>(raw >> 64);
    auto lo = static_cast<std::uint64_t>(raw);
    return std::ldexp(static_cast<long double>(hi), -63) +
           std::ldexp(static_cast<long double>(lo), -127);
}

inline double fraction_to_double(u128 raw) {
    return static_cast<double>(fraction_to_long_double(raw));
}

/// floor(x * 2^127) for x in [0, 1]; values outside are clamped.
inline u128 fraction_from_long_double(long double x) {
    if (!(x > 0.0L)) return 0;
    if (x >= 1.0L) return kOne;
    // Split so that each conversion stays inside the 64-bit mantissa range.
    long double scaled_hi = std::ldexp(x, 63);
    long double hi = std::floor(scaled_hi);
    long double rest = std::ldexp(scaled_hi - hi, 64);
    u128 out = static_cast<u128>(static_cast<std::uint64_t>(hi)) << 64;
    out += static_cast<u128>(static_cast<std::uint64_t>(std::floor(rest)));
    return out;
}

inline std::string to_hex(u128 v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(32, '0');
    for (int i = 31; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[static_cast<unsigned>(v & 0xf)];
        v >>= 4;
    }
    return out;
}

inline u128 parse_hex(std::string_view s) {
    if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
    require(!s.empty() && s.size() <= 32, "hex fixed-point value must have 1..32 digits");
    u128 v = 0;
    for (char c : s) {
        unsigned d;
        if (c >= '0' && c <= '9') d = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f') d = static_cast<unsigned>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') d = static_cast<unsigned>(c - 'A' + 10);
        else fail(ErrorKind::Precondition, "invalid hex digit in '" + std::string(s) + "'");
        v = (v << 4) | d;
    }
    return v;
}

/// A point of T held as a 127-bit binary fraction in [0, 1).
class CirclePoint {
public:
    constexpr CirclePoint() = default;

    static constexpr CirclePoint from_raw(u128 raw) { return CirclePoint(raw & kMask); }

    /// Reduces mod 1 and truncates to the 2^-127 grid.
    static CirclePoint from_double(double x) {
        long double r = static_cast<long double>(x) - std::floor(static_cast<long double>(x));
        return from_raw(fraction_from_long_double(r));
    }

    static CirclePoint from_hex(std::string_view s) {
        u128 v = parse_hex(s);
        require(v < kOne, "circle point must be below 2^127");
        return CirclePoint(v);
    }

    constexpr u128 raw() const { return raw_; }
    double to_double() const { return fraction_to_double(raw_); }
    long double to_long_double() const { return fraction_to_long_double(raw_); }
    std::string hex() const { return to_hex(raw_); }

    constexpr CirclePoint operator+(CirclePoint o) const { return from_raw(raw_ + o.raw_); }
    constexpr CirclePoint operator-(CirclePoint o) const { return from_raw(raw_ - o.raw_); }
    constexpr CirclePoint& operator+=(CirclePoint o) { return *this = *this + o; }

    /// k * x mod 1; wrapping at 2^128 is harmless because 2^127 divides it.
    constexpr CirclePoint times(std::uint64_t k) const { return from_raw(raw_ * k); }

    /// Offset moved forward by a length (length may be kOne).
    constexpr CirclePoint advanced(u128 length) const { return from_raw(raw_ + length); }

    friend constexpr auto operator<=>(CirclePoint, CirclePoint) = default;

private:
    constexpr explicit CirclePoint(u128 raw) : raw_(raw) {}
    u128 raw_ = 0;
};

/// Distance on T between two points, as a raw fraction in [0, 1/2].
constexpr u128 circle_distance(CirclePoint a, CirclePoint b) {
    u128 d = (a - b).raw();
    u128 e = (b - a).raw();
    return d < e ? d : e;
}

/// sin(2 pi x) with the argument folded into [-1/2, 1/2) before scaling.
inline double sin_two_pi(CirclePoint x) {
    long double t = x.to_long_double();
    if (t >= 0.5L) t -= 1.0L;
    return static_cast<double>(std::sin(2.0L * 3.14159265358979323846264338327950288L * t));
}

inline double cos_two_pi(CirclePoint x) {
    long double t = x.to_long_double();
    if (t >= 0.5L) t -= 1.0L;
    return static_cast<double>(std::cos(2.0L * 3.14159265358979323846264338327950288L * t));
}

} // namespace birkhoff_lab
