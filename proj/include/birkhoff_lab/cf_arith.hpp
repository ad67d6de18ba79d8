#pragma once

// Continued-fraction machinery for the rotation number alpha.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "birkhoff_lab/error.hpp"
#include "birkhoff_lab/fixed_point.hpp"

namespace birkhoff_lab {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr int kDefaultPrecision = 127;

struct AlphaSource {
    enum class Kind { Quotients, Decimal, Fixture };
    Kind kind = Kind::Fixture;
    std::vector<std::uint64_t> prefix;  // a_1, a_2, ... before the period
    std::vector<std::uint64_t> period;  // repeated forever; never empty for Quotients
    std::string digits;                 // fractional decimal digits for Decimal
    std::string text;                   // spec string as given
};

namespace detail {

inline u128 to_u128(const BigInt& v) {
    u128 out = 0;
    BigInt t = v;
    for (int shift = 0; shift < 128 && t != 0; shift += 64) {
        auto limb = static_cast<std::uint64_t>(t & BigInt(std::numeric_limits<std::uint64_t>::max()));
        out |= static_cast<u128>(limb) << shift;
        t >>= 64;
    }
    return out;
}

inline BigInt from_u128(u128 v) {
    BigInt out = static_cast<std::uint64_t>(v >> 64);
    out <<= 64;
    out += static_cast<std::uint64_t>(v);
    return out;
}

/// round(p / q * 2^bits), ties up; p/q irrational-adjacent so ties do not matter.
inline BigInt round_scaled(const BigInt& p, const BigInt& q, int bits) {
    BigInt num = (p << (bits + 1)) + q;
    return num / (q * 2);
}

inline double bigint_log(const BigInt& v) {
    // log of a positive big integer without overflowing double.
    unsigned bits = boost::multiprecision::msb(v);
    if (bits < 60) return std::log(static_cast<double>(v.convert_to<std::uint64_t>()));
    unsigned shift = bits - 60;
    auto top = static_cast<double>(static_cast<std::uint64_t>(v >> shift));
    return std::log(top) + shift * std::log(2.0);
}

} // namespace detail

/// An irrational rotation number in (0,1), kept as a 127-bit fraction rounded
/// to `precision` significant fractional bits.
class RotationNumber {
public:
    static RotationNumber from_quotients(std::vector<std::uint64_t> prefix,
                                         std::vector<std::uint64_t> period,
                                         int precision = kDefaultPrecision) {
        check_precision(precision);
        if (period.empty())
            fail(ErrorKind::RationalInput,
                 "a finite quotient list defines a rational number; give a periodic tail");
        for (auto a : prefix) require(a >= 1, "partial quotients must be >= 1");
        for (auto a : period) require(a >= 1, "partial quotients must be >= 1");
        RotationNumber r;
        r.source_.kind = AlphaSource::Kind::Quotients;
        r.source_.prefix = std::move(prefix);
        r.source_.period = std::move(period);
        r.precision_ = precision;
        r.value_ = r.value_from_quotients();
        return r;
    }

    /// `digits` are the fractional digits after "0."; the true value is taken
    /// to lie within one unit of the last digit.
    static RotationNumber from_decimal(std::string digits, int precision = kDefaultPrecision) {
        check_precision(precision);
        require(!digits.empty(), "decimal source needs at least one digit");
        for (char c : digits) require(c >= '0' && c <= '9', "decimal source must be digits only");
        RotationNumber r;
        r.source_.kind = AlphaSource::Kind::Decimal;
        r.source_.digits = digits;
        r.precision_ = precision;
        BigInt n(digits);
        BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(digits.size()));
        BigInt v = detail::round_scaled(n, scale, precision) << (kFracBits - precision);
        if (v <= 0 || v >= detail::from_u128(kOne))
            fail(ErrorKind::Precondition, "decimal alpha must lie strictly inside (0,1)");
        r.value_ = CirclePoint::from_raw(detail::to_u128(v));
        return r;
    }

    /// Test fixture: an exact fixed-point value with no continued-fraction data
    /// (used for rational stand-ins such as alpha = 1/4).
    static RotationNumber fixture(CirclePoint value) {
        RotationNumber r;
        r.source_.kind = AlphaSource::Kind::Fixture;
        r.value_ = value;
        r.precision_ = kFracBits;
        return r;
    }

    static RotationNumber golden(int precision = kDefaultPrecision) {
        return from_quotients({}, {1}, precision);
    }
    static RotationNumber sqrt2_minus_1(int precision = kDefaultPrecision) {
        return from_quotients({}, {2}, precision);
    }

    CirclePoint value() const { return value_; }
    int precision() const { return precision_; }
    const AlphaSource& source() const { return source_; }
    void set_text(std::string text) { source_.text = std::move(text); }

    /// a_k for k >= 1 of a quotient source.
    std::uint64_t quotient(std::size_t k) const {
        require(source_.kind == AlphaSource::Kind::Quotients, "quotient() needs a quotient source");
        require(k >= 1, "quotients are indexed from 1");
        if (k <= source_.prefix.size()) return source_.prefix[k - 1];
        return source_.period[(k - 1 - source_.prefix.size()) % source_.period.size()];
    }

private:
    static void check_precision(int precision) {
        require(precision >= 8 && precision <= kFracBits, "precision must be in [8, 127]");
    }

    CirclePoint value_from_quotients() const {
        // Unroll until two consecutive convergents round to the same P-bit
        // value; alpha lies between them and rounding is monotone.
        BigInt p0 = 1, q0 = 0, p1 = 0, q1 = 1;  // (p_{-1}, q_{-1}), (p_0, q_0)
        std::optional<BigInt> prev;
        for (std::size_t k = 1; k < 100000; ++k) {
            BigInt a = quotient(k);
            BigInt p2 = a * p1 + p0, q2 = a * q1 + q0;
            p0 = p1; q0 = q1; p1 = p2; q1 = q2;
            BigInt rounded = detail::round_scaled(p1, q1, precision_);
            if (prev && *prev == rounded && q1 * q1 > (BigInt(1) << (precision_ + 2))) {
                BigInt v = rounded << (kFracBits - precision_);
                if (v <= 0 || v >= detail::from_u128(kOne))
                    fail(ErrorKind::PrecisionExhausted, "alpha rounds to 0 or 1 at this precision");
                return CirclePoint::from_raw(detail::to_u128(v));
            }
            prev = rounded;
        }
        fail(ErrorKind::PrecisionExhausted, "periodic expansion did not stabilise");
    }

    AlphaSource source_;
    CirclePoint value_;
    int precision_ = kDefaultPrecision;
};

/// Parses `golden`, `sqrt2m1`, `quotients:1,1,2,periodic:3,4`, `decimal:0.618...`.
inline RotationNumber parse_alpha(std::string_view spec, int precision = kDefaultPrecision) {
    auto parse_list = [](std::string_view s) {
        std::vector<std::uint64_t> out;
        while (!s.empty()) {
            auto comma = s.find(',');
            auto tok = s.substr(0, comma);
            std::uint64_t v = 0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size())
                fail(ErrorKind::Precondition, "bad partial quotient '" + std::string(tok) + "'");
            out.push_back(v);
            if (comma == std::string_view::npos) break;
            s.remove_prefix(comma + 1);
        }
        return out;
    };

    RotationNumber r = [&] {
        if (spec == "golden") return RotationNumber::golden(precision);
        if (spec == "sqrt2m1") return RotationNumber::sqrt2_minus_1(precision);
        if (spec.starts_with("quotients:")) {
            std::string_view body = spec.substr(10);
            std::vector<std::uint64_t> prefix, period;
            auto pos = body.find("periodic:");
            if (pos == std::string_view::npos) {
                prefix = parse_list(body);
            } else {
                std::string_view head = body.substr(0, pos);
                if (!head.empty() && head.back() == ',') head.remove_suffix(1);
                prefix = parse_list(head);
                period = parse_list(body.substr(pos + 9));
            }
            return RotationNumber::from_quotients(std::move(prefix), std::move(period), precision);
        }
        if (spec.starts_with("decimal:")) {
            std::string_view body = spec.substr(8);
            while (body.ends_with('.')) body.remove_suffix(1);  // trailing "..."
            if (body.starts_with("0.")) body.remove_prefix(2);
            else if (body.starts_with(".")) body.remove_prefix(1);
            else fail(ErrorKind::Precondition, "decimal alpha must be written 0.ddd");
            return RotationNumber::from_decimal(std::string(body), precision);
        }
        fail(ErrorKind::Precondition, "unknown alpha spec '" + std::string(spec) + "'");
    }();
    r.set_text(std::string(spec));
    return r;
}

/// a_1..a_K. Decimal sources only return quotients certified by their digits.
inline std::vector<std::uint64_t> partial_quotients(const RotationNumber& alpha, std::size_t K) {
    require(K >= 1, "need K >= 1");
    const auto& src = alpha.source();
    std::vector<std::uint64_t> out;
    out.reserve(K);
    switch (src.kind) {
        case AlphaSource::Kind::Quotients:
            for (std::size_t k = 1; k <= K; ++k) out.push_back(alpha.quotient(k));
            return out;
        case AlphaSource::Kind::Fixture:
            fail(ErrorKind::RationalInput, "fixture alpha carries no continued fraction");
        case AlphaSource::Kind::Decimal: break;
    }
    // The value lies in [(2N-1)/(2*10^D), (N+1)/10^D], which covers both a
    // rounded and a truncated decimal. A quotient is certified once both
    // endpoints share it, since each cylinder set is an interval.
    BigInt n(src.digits);
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(src.digits.size()));
    BigInt lo_num = 2 * n - 1, lo_den = 2 * scale;
    BigInt hi_num = n + 1, hi_den = scale;
    if (lo_num <= 0 || hi_num >= hi_den)
        fail(ErrorKind::PrecisionExhausted, "decimal too coarse to certify a_1");
    for (std::size_t k = 1; k <= K; ++k) {
        if (lo_num == 0 || hi_num == 0)
            fail(ErrorKind::PrecisionExhausted,
                 "decimal certifies only " + std::to_string(k - 1) + " partial quotients");
        BigInt a_lo = lo_den / lo_num, a_hi = hi_den / hi_num;
        BigInt r_lo = lo_den % lo_num, r_hi = hi_den % hi_num;
        if (a_lo != a_hi || r_lo == 0 || r_hi == 0)
            fail(ErrorKind::PrecisionExhausted,
                 "decimal certifies only " + std::to_string(k - 1) + " partial quotients");
        out.push_back(a_lo.convert_to<std::uint64_t>());
        // x = 1/(a + r/num): next remainder is r/num, so (num, den) <- (r, num)
        lo_den = lo_num; lo_num = r_lo;
        hi_den = hi_num; hi_num = r_hi;
        // The map x -> 1/x - a reverses order, so the endpoints swap roles.
        std::swap(lo_num, hi_num);
        std::swap(lo_den, hi_den);
    }
    return out;
}

struct Convergent {
    std::size_t k = 0;
    BigInt p, q;
    BigInt scaled_error;  // q*alpha - p, exactly, in units of 2^-127

    double error() const {
        return std::ldexp(scaled_error.convert_to<double>(), -kFracBits);
    }
    int sign() const { return scaled_error > 0 ? 1 : (scaled_error < 0 ? -1 : 0); }
    BigInt abs_scaled_error() const { return boost::multiprecision::abs(scaled_error); }
};

namespace detail {

/// Convergents k = 0..K from the quotient sequence.
inline std::vector<Convergent> convergent_table(const RotationNumber& alpha, std::size_t K) {
    std::vector<std::uint64_t> a = partial_quotients(alpha, std::max<std::size_t>(K, 1));
    BigInt A = from_u128(alpha.value().raw());
    BigInt one = from_u128(kOne);
    std::vector<Convergent> out;
    out.reserve(K + 1);
    BigInt pm = 1, qm = 0, p = 0, q = 1;
    out.push_back({0, p, q, q * A - p * one});
    for (std::size_t k = 1; k <= K; ++k) {
        BigInt pn = a[k - 1] * p + pm, qn = a[k - 1] * q + qm;
        pm = p; qm = q; p = pn; q = qn;
        out.push_back({k, p, q, q * A - p * one});
    }
    return out;
}

} // namespace detail

/// Convergents p_k/q_k for k = 1..K.
inline std::vector<Convergent> convergents(const RotationNumber& alpha, std::size_t K) {
    require(K >= 1, "need K >= 1");
    auto table = detail::convergent_table(alpha, K);
    table.erase(table.begin());
    return table;
}

/// Denominators q_0..q_K as 64-bit integers (throws once they overflow).
inline std::vector<std::uint64_t> denominators(const RotationNumber& alpha, std::size_t K) {
    auto table = detail::convergent_table(alpha, K);
    std::vector<std::uint64_t> out;
    out.reserve(table.size());
    for (const auto& c : table) {
        if (c.q > std::numeric_limits<std::uint64_t>::max())
            fail(ErrorKind::BudgetExceeded, "convergent denominator exceeds 64 bits");
        out.push_back(c.q.convert_to<std::uint64_t>());
    }
    return out;
}

struct TypeExponents {
    std::vector<std::size_t> index;  // n
    std::vector<double> tau;         // tau_n = ln q_{n+2} / ln q_n
    std::size_t window = 5;
    double liminf = 0.0;             // min over the trailing window
};

inline TypeExponents type_exponents(const RotationNumber& alpha, std::size_t K, std::size_t window = 5) {
    if (K < 3) fail(ErrorKind::InsufficientDepth, "type exponents need K >= 3");
    require(window >= 1, "window must be >= 1");
    auto table = detail::convergent_table(alpha, K + 2);
    TypeExponents out;
    out.window = window;
    for (std::size_t n = 0; n <= K; ++n) {
        if (table[n].q < 2) continue;
        out.index.push_back(n);
        out.tau.push_back(detail::bigint_log(table[n + 2].q) / detail::bigint_log(table[n].q));
    }
    if (out.tau.empty()) fail(ErrorKind::InsufficientDepth, "no q_n >= 2 within depth");
    std::size_t start = out.tau.size() > window ? out.tau.size() - window : 0;
    out.liminf = *std::min_element(out.tau.begin() + static_cast<std::ptrdiff_t>(start), out.tau.end());
    return out;
}

} // namespace birkhoff_lab
