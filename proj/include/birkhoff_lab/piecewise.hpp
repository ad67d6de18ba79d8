#pragma once

// Piecewise functions on T built from constant, affine and power-cusp pieces.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "birkhoff_lab/arcs.hpp"
#include "birkhoff_lab/error.hpp"
#include "birkhoff_lab/fixed_point.hpp"

namespace birkhoff_lab {

enum class SegmentKind { Constant, Affine, PowerCusp };

/// One piece of a PiecewiseFn, supported on the arc [start, start + length).
///
/// Constant: value `left`. Affine: `left` at the start, `right` at the end.
/// PowerCusp: scale * t^exponent, where t is the distance to the anchor; the
/// anchor is the start for side = +1 and the end for side = -1.
struct Segment {
    CirclePoint start;
    u128 length = 0;
    SegmentKind kind = SegmentKind::Constant;
    double left = 0.0;
    double right = 0.0;
    double scale = 0.0;
    double exponent = 1.0;
    int side = +1;

    static Segment constant(CirclePoint start, u128 length, double value) {
        Segment s;
        s.start = start; s.length = length; s.kind = SegmentKind::Constant;
        s.left = s.right = value;
        return s;
    }
    static Segment affine(CirclePoint start, u128 length, double left, double right) {
        Segment s;
        s.start = start; s.length = length; s.kind = SegmentKind::Affine;
        s.left = left; s.right = right;
        return s;
    }
    static Segment cusp(CirclePoint start, u128 length, double scale, double exponent, int side) {
        require(side == 1 || side == -1, "cusp side must be +1 or -1");
        require(exponent > 0.0 && exponent <= 1.0, "cusp exponent must be in (0, 1]");
        Segment s;
        s.start = start; s.length = length; s.kind = SegmentKind::PowerCusp;
        s.scale = scale; s.exponent = exponent; s.side = side;
        return s;
    }

    CirclePoint end() const { return start.advanced(length); }
    bool wraps() const { return start.raw() + length > kOne; }

    /// Value at offset t in [0, length).
    double at_offset(u128 t) const {
        switch (kind) {
            case SegmentKind::Constant: return left;
            case SegmentKind::Affine: {
                long double r = fraction_to_long_double(t) / fraction_to_long_double(length);
                return static_cast<double>(left + (static_cast<long double>(right) - left) * r);
            }
            case SegmentKind::PowerCusp: {
                u128 d = side > 0 ? t : length - t;
                return scale * std::pow(fraction_to_double(d), exponent);
            }
        }
        return 0.0;
    }

    double left_value() const { return at_offset(0); }

    double right_limit() const {
        switch (kind) {
            case SegmentKind::Constant: return left;
            case SegmentKind::Affine: return right;
            case SegmentKind::PowerCusp:
                return side > 0 ? scale * std::pow(fraction_to_double(length), exponent) : 0.0;
        }
        return 0.0;
    }

    double sup_abs() const {
        switch (kind) {
            case SegmentKind::Constant: return std::abs(left);
            case SegmentKind::Affine: return std::max(std::abs(left), std::abs(right));
            case SegmentKind::PowerCusp:
                return std::abs(scale) * std::pow(fraction_to_double(length), exponent);
        }
        return 0.0;
    }
};

namespace detail {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(long double v) {
        long double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v;
        else comp_ += (v - t) + sum_;
        sum_ = t;
    }
    long double value() const { return sum_ + comp_; }

private:
    long double sum_ = 0.0L;
    long double comp_ = 0.0L;
};

inline std::uint64_t bits_of(double v) { return std::bit_cast<std::uint64_t>(v); }

} // namespace detail

enum class Continuity { Require, Allow };

/// A function on T given by disjoint segments; uncovered points have value 0.
class PiecewiseFn {
public:
    PiecewiseFn() = default;

    explicit PiecewiseFn(std::vector<Segment> segments, Continuity continuity = Continuity::Require)
        : segments_(std::move(segments)) {
        std::erase_if(segments_, [](const Segment& s) { return s.length == 0; });
        std::sort(segments_.begin(), segments_.end(),
                  [](const Segment& a, const Segment& b) { return a.start < b.start; });
        validate_layout();
        starts_.reserve(segments_.size());
        for (const auto& s : segments_) starts_.push_back(s.start.raw());
        if (continuity == Continuity::Require) {
            double jump = max_jump();
            if (jump > 0.0)
                fail(ErrorKind::InvariantViolation,
                     "discontinuity of size " + std::to_string(jump) + " at a breakpoint");
        }
        mean_ = compute_mean();
        double sup = 0.0;
        for (const auto& s : segments_) sup = std::max(sup, s.sup_abs());
        sup_ = sup;
    }

    const std::vector<Segment>& segments() const { return segments_; }

    double operator()(CirclePoint x) const {
        if (segments_.empty()) return 0.0;
        auto it = std::upper_bound(starts_.begin(), starts_.end(), x.raw());
        const Segment& s = it == starts_.begin()
                               ? segments_.back()
                               : segments_[static_cast<std::size_t>(it - starts_.begin() - 1)];
        u128 t = (x - s.start).raw();
        return t < s.length ? s.at_offset(t) : 0.0;
    }

    double eval(CirclePoint x) const { return (*this)(x); }

    double mean() const { return mean_; }
    double sup_norm() const { return sup_; }

    /// Support of the function, as the union of its segment arcs.
    ArcSet support() const {
        std::vector<Arc> arcs;
        arcs.reserve(segments_.size());
        for (const auto& s : segments_) arcs.push_back(Arc{s.start, s.length});
        return ArcSet::from_arcs(arcs);
    }

    std::vector<CirclePoint> breakpoints() const {
        std::vector<CirclePoint> out;
        out.reserve(2 * segments_.size());
        for (const auto& s : segments_) {
            out.push_back(s.start);
            out.push_back(s.end());
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Largest jump across a breakpoint beyond the rounding tolerance (0 if continuous).
    double max_jump() const {
        double worst = 0.0;
        auto check = [&](double a, double b) {
            double tol = std::ldexp(1.0, -119) + 8 * std::numeric_limits<double>::epsilon() *
                                                     std::max(std::abs(a), std::abs(b));
            double gap = std::abs(a - b);
            if (gap > tol) worst = std::max(worst, gap);
        };
        const std::size_t n = segments_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Segment& s = segments_[i];
            const Segment& next = segments_[(i + 1) % n];
            bool abuts = s.end() == next.start && !(n == 1 && s.length < kOne);
            if (n == 1 && s.length == kOne) abuts = true;
            if (abuts) {
                check(s.right_limit(), next.left_value());
            } else {
                check(s.right_limit(), 0.0);
                check(0.0, next.left_value());
            }
        }
        return worst;
    }

    /// Upper bound on sup |f(x)-f(y)| / |x-y|^xi, using circle distance.
    double lip_seminorm(double xi) const;

private:
    void validate_layout() const {
        const std::size_t n = segments_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Segment& s = segments_[i];
            require(s.length <= kOne, "segment longer than the circle");
            if (i + 1 < n) {
                if (s.wraps() || s.start.raw() + s.length > segments_[i + 1].start.raw())
                    fail(ErrorKind::InvariantViolation, "overlapping segments");
            } else if (s.wraps()) {
                if (s.start.raw() + s.length - kOne > segments_[0].start.raw() && n > 1)
                    fail(ErrorKind::InvariantViolation, "wrapping segment overlaps the first segment");
                if (n == 1 && s.length > kOne)
                    fail(ErrorKind::InvariantViolation, "segment longer than the circle");
            }
        }
    }

    double compute_mean() const {
        // Group contributions by value so that symmetric constructions cancel
        // exactly before any rounding takes place.
        using Wide = boost::multiprecision::int256_t;
        std::map<std::uint64_t, Wide> flat;    // |c| -> signed total length
        std::map<std::uint64_t, Wide> ramps;   // |a+b| -> signed total length
        std::map<std::tuple<std::uint64_t, u128, std::uint64_t>, long long> cusps;
        for (const auto& s : segments_) {
            switch (s.kind) {
                case SegmentKind::Constant:
                    if (s.left != 0.0) {
                        Wide w = Wide(static_cast<std::uint64_t>(s.length >> 64)) << 64;
                        w += static_cast<std::uint64_t>(s.length);
                        flat[detail::bits_of(std::abs(s.left))] += s.left > 0 ? w : Wide(-w);
                    }
                    break;
                case SegmentKind::Affine: {
                    double sum = s.left + s.right;
                    if (sum != 0.0) {
                        Wide w = Wide(static_cast<std::uint64_t>(s.length >> 64)) << 64;
                        w += static_cast<std::uint64_t>(s.length);
                        ramps[detail::bits_of(std::abs(sum))] += sum > 0 ? w : Wide(-w);
                    }
                    break;
                }
                case SegmentKind::PowerCusp:
                    if (s.scale != 0.0)
                        cusps[{detail::bits_of(s.exponent), s.length, detail::bits_of(std::abs(s.scale))}] +=
                            s.scale > 0 ? 1 : -1;
                    break;
            }
        }
        detail::CompensatedSum total;
        auto wide_fraction = [](const Wide& w) {
            return std::ldexp(w.convert_to<long double>(), -kFracBits);
        };
        for (const auto& [key, w] : flat)
            if (w != 0) total.add(std::bit_cast<double>(key) * wide_fraction(w));
        for (const auto& [key, w] : ramps)
            if (w != 0) total.add(0.5L * std::bit_cast<double>(key) * wide_fraction(w));
        for (const auto& [key, count] : cusps) {
            if (count == 0) continue;
            auto [ebits, len, sbits] = key;
            long double e = std::bit_cast<double>(ebits);
            long double L = fraction_to_long_double(len);
            total.add(static_cast<long double>(count) * std::bit_cast<double>(sbits) *
                      std::pow(L, e + 1.0L) / (e + 1.0L));
        }
        return static_cast<double>(total.value());
    }

    std::vector<Segment> segments_;
    std::vector<u128> starts_;
    double mean_ = 0.0;
    double sup_ = 0.0;
};

inline double PiecewiseFn::lip_seminorm(double xi) const {
    require(xi > 0.0 && xi <= 1.0, "xi must be in (0, 1]");
    // Atoms: monotone, single-signed pieces with their own Holder-xi constant.
    struct Atom {
        u128 lo;       // start, raw
        u128 length;
        int sign;      // sign of f on the atom (0 for a zero piece)
        int direction; // +1 |f| rising, -1 falling, 0 flat
        double c;      // Holder-xi constant on the atom
        bool zero_at_end = false;
    };
    std::vector<Atom> atoms;
    atoms.reserve(segments_.size() + 8);
    auto sgn = [](double v) { return (v > 0) - (v < 0); };
    for (const auto& s : segments_) {
        double L = fraction_to_double(s.length);
        switch (s.kind) {
            case SegmentKind::Constant:
                atoms.push_back({s.start.raw(), s.length, sgn(s.left), 0, 0.0, false});
                break;
            case SegmentKind::Affine: {
                double a = s.left, b = s.right;
                if (a * b < 0.0) {
                    // Split at the zero crossing.
                    long double r = std::abs(static_cast<long double>(a)) /
                                    (std::abs(static_cast<long double>(a)) + std::abs(static_cast<long double>(b)));
                    u128 cut = fraction_from_long_double(fraction_to_long_double(s.length) * r);
                    cut = std::clamp<u128>(cut, 1, s.length - 1);
                    double slope = std::abs(b - a) / L;
                    double l1 = fraction_to_double(cut), l2 = fraction_to_double(s.length - cut);
                    atoms.push_back({s.start.raw(), cut, sgn(a), -1, slope * std::pow(l1, 1.0 - xi), true});
                    atoms.push_back({s.start.advanced(cut).raw(), s.length - cut, sgn(b), +1,
                                     slope * std::pow(l2, 1.0 - xi), false});
                } else {
                    int sign = a != 0.0 ? sgn(a) : sgn(b);
                    int dir = std::abs(b) > std::abs(a) ? 1 : (std::abs(b) < std::abs(a) ? -1 : 0);
                    atoms.push_back({s.start.raw(), s.length, sign, dir, std::abs(b - a) / std::pow(L, xi), b == 0.0});
                }
                break;
            }
            case SegmentKind::PowerCusp:
                if (s.exponent < xi)
                    fail(ErrorKind::UnsupportedExponent,
                         "cusp exponent " + std::to_string(s.exponent) + " is below xi = " +
                             std::to_string(xi) + "; the seminorm is infinite");
                atoms.push_back({s.start.raw(), s.length, sgn(s.scale), s.side,
                                 std::abs(s.scale) * std::pow(L, s.exponent - xi), s.side < 0});
                break;
        }
    }
    std::erase_if(atoms, [](const Atom& a) { return a.sign == 0; });
    if (atoms.empty()) return 0.0;

    // A lobe boundary (a zero of f) sits before atom i if atom i does not
    // abut its predecessor, has the opposite sign, or f vanishes at the junction.
    const std::size_t n = atoms.size();
    auto end_of = [](const Atom& a) { return (a.lo + a.length) & kMask; };
    auto boundary_before = [&](std::size_t i) {
        const Atom& prev = atoms[(i + n - 1) % n];
        const Atom& cur = atoms[i];
        if (n == 1) return !(cur.length == kOne) || prev.zero_at_end;
        return end_of(prev) != cur.lo || prev.sign != cur.sign || prev.zero_at_end;
    };
    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < n; ++i)
        if (boundary_before(i)) { first = i; break; }

    auto chain = [xi](double cmax, std::size_t k) {
        return k == 0 ? 0.0 : cmax * std::pow(static_cast<double>(k), 1.0 - xi);
    };

    if (!first) {
        // f never vanishes: one closed loop of atoms.
        double cmax = 0.0;
        std::size_t k = 0;
        for (const auto& a : atoms)
            if (a.c > 0) { cmax = std::max(cmax, a.c); ++k; }
        return chain(cmax, k);
    }

    struct Lobe {
        u128 lo, hi_raw;  // hi is the end point (mod 1)
        u128 length;
        int sign;
        double bound;
    };
    std::vector<Lobe> lobes;
    std::size_t i = *first;
    for (std::size_t visited = 0; visited < n;) {
        Lobe lobe{atoms[i].lo, 0, 0, atoms[i].sign, 0.0};
        double c_rise = 0.0, c_fall = 0.0, c_all = 0.0;
        std::size_t k_rise = 0, k_fall = 0, k_all = 0;
        bool falling = false, unimodal = true;
        do {
            const Atom& a = atoms[i];
            if (a.direction < 0) falling = true;
            else if (a.direction > 0 && falling) unimodal = false;
            if (a.c > 0) {
                ++k_all;
                c_all = std::max(c_all, a.c);
                if (falling) { ++k_fall; c_fall = std::max(c_fall, a.c); }
                else { ++k_rise; c_rise = std::max(c_rise, a.c); }
            }
            lobe.length += a.length;
            lobe.hi_raw = end_of(a);
            i = (i + 1) % n;
            ++visited;
        } while (visited < n && !boundary_before(i));
        lobe.bound = unimodal ? std::max(chain(c_rise, k_rise), chain(c_fall, k_fall)) : chain(c_all, k_all);
        lobes.push_back(lobe);
    }

    double within = 0.0;
    for (const auto& l : lobes) within = std::max(within, l.bound);
    if (lobes.size() == 1) return within;

    // Across lobes: same sign costs nothing extra; opposite signs pay the
    // concavity factor 2 D^xi / (2D + g)^xi, g the smallest zero gap
    // separating two consecutive lobes of opposite sign.
    std::optional<u128> min_gap;
    u128 max_len = 0;
    for (std::size_t j = 0; j < lobes.size(); ++j) {
        const Lobe& a = lobes[j];
        const Lobe& b = lobes[(j + 1) % lobes.size()];
        max_len = std::max(max_len, a.length);
        if (a.sign != b.sign) {
            u128 gap = (CirclePoint::from_raw(b.lo) - CirclePoint::from_raw(a.hi_raw)).raw();
            min_gap = min_gap ? std::min(*min_gap, gap) : gap;
        }
    }
    if (!min_gap) return within;
    double D = fraction_to_double(max_len);
    double g = fraction_to_double(*min_gap);
    double factor = 2.0 * std::pow(D, xi) / std::pow(2.0 * D + g, xi);
    return std::max(within, within * std::max(1.0, factor));
}

} // namespace birkhoff_lab
