#pragma once

// Arcs and finite unions of arcs on T, exact on the 2^-127 grid.

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "birkhoff_lab/error.hpp"
#include "birkhoff_lab/fixed_point.hpp"

namespace birkhoff_lab {

/// Half-open arc [start, start + length) on T; length in (0, 1].
struct Arc {
    CirclePoint start;
    u128 length = 0;

    static Arc make(CirclePoint start, u128 length) {
        require(length > 0 && length <= kOne, "arc length must be in (0, 1]");
        return Arc{start, length};
    }

    /// The closed interval [a, b] on the grid, i.e. [a, b + 2^-127).
    static Arc closed(CirclePoint a, CirclePoint b) {
        return make(a, (b - a).raw() + 1);
    }

    CirclePoint end() const { return start.advanced(length); }
    bool wraps() const { return start.raw() + length > kOne; }

    bool contains(CirclePoint x) const { return (x - start).raw() < length || length == kOne; }

    friend bool operator==(const Arc&, const Arc&) = default;
};

/// Finite union of arcs, stored as sorted, disjoint, non-adjacent linear
/// pieces [lo, hi) with 0 <= lo < hi <= 2^127.
class ArcSet {
public:
    struct Piece {
        u128 lo = 0, hi = 0;
        friend bool operator==(const Piece&, const Piece&) = default;
    };

    ArcSet() = default;

    static ArcSet full() {
        ArcSet s;
        s.pieces_.push_back({0, kOne});
        return s;
    }

    static ArcSet from_arcs(std::span<const Arc> arcs) {
        std::vector<Piece> raw;
        raw.reserve(arcs.size() + 1);
        for (const auto& a : arcs) append_arc(raw, a);
        return from_pieces(std::move(raw));
    }

    static ArcSet from_arc(const Arc& a) { return from_arcs(std::span<const Arc>(&a, 1)); }

    /// Normalises arbitrary (possibly overlapping, unsorted) linear pieces.
    static ArcSet from_pieces(std::vector<Piece> raw) {
        std::erase_if(raw, [](const Piece& p) { return p.hi <= p.lo; });
        std::sort(raw.begin(), raw.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
        ArcSet s;
        for (const auto& p : raw) {
            require(p.hi <= kOne, "piece exceeds the unit interval");
            if (!s.pieces_.empty() && p.lo <= s.pieces_.back().hi)
                s.pieces_.back().hi = std::max(s.pieces_.back().hi, p.hi);
            else
                s.pieces_.push_back(p);
        }
        return s;
    }

    const std::vector<Piece>& pieces() const { return pieces_; }
    bool empty() const { return pieces_.empty(); }

    u128 measure() const {
        u128 m = 0;
        for (const auto& p : pieces_) m += p.hi - p.lo;
        return m;
    }
    double measure_double() const { return fraction_to_double(measure()); }

    /// Arcs of the set, with a piece touching 1 glued to one touching 0.
    std::vector<Arc> arcs() const {
        std::vector<Arc> out;
        if (pieces_.empty()) return out;
        if (pieces_.size() == 1 && pieces_[0].lo == 0 && pieces_[0].hi == kOne)
            return {Arc{CirclePoint{}, kOne}};
        bool glue = pieces_.size() >= 2 && pieces_.front().lo == 0 && pieces_.back().hi == kOne;
        std::size_t first = glue ? 1 : 0;
        std::size_t last = glue ? pieces_.size() - 1 : pieces_.size();
        out.reserve(pieces_.size());
        for (std::size_t i = first; i < last; ++i)
            out.push_back(Arc{CirclePoint::from_raw(pieces_[i].lo), pieces_[i].hi - pieces_[i].lo});
        if (glue) {
            const auto& b = pieces_.back();
            const auto& f = pieces_.front();
            out.push_back(Arc{CirclePoint::from_raw(b.lo), (b.hi - b.lo) + (f.hi - f.lo)});
        }
        return out;
    }

    std::size_t arc_count() const {
        std::size_t n = pieces_.size();
        if (n >= 2 && pieces_.front().lo == 0 && pieces_.back().hi == kOne) --n;
        return n;
    }

    bool contains(CirclePoint x) const {
        u128 v = x.raw();
        auto it = std::upper_bound(pieces_.begin(), pieces_.end(), v,
                                   [](u128 val, const Piece& p) { return val < p.lo; });
        if (it == pieces_.begin()) return false;
        --it;
        return v < it->hi;
    }

    ArcSet complement() const {
        ArcSet s;
        u128 cursor = 0;
        for (const auto& p : pieces_) {
            if (p.lo > cursor) s.pieces_.push_back({cursor, p.lo});
            cursor = p.hi;
        }
        if (cursor < kOne) s.pieces_.push_back({cursor, kOne});
        return s;
    }

    ArcSet intersect(const ArcSet& o) const {
        ArcSet s;
        std::size_t i = 0, j = 0;
        while (i < pieces_.size() && j < o.pieces_.size()) {
            const auto& a = pieces_[i];
            const auto& b = o.pieces_[j];
            u128 lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
            if (lo < hi) s.pieces_.push_back({lo, hi});
            if (a.hi < b.hi) ++i; else ++j;
        }
        return s;
    }

    ArcSet unite(const ArcSet& o) const {
        std::vector<Piece> all;
        all.reserve(pieces_.size() + o.pieces_.size());
        std::merge(pieces_.begin(), pieces_.end(), o.pieces_.begin(), o.pieces_.end(),
                   std::back_inserter(all), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
        ArcSet s;
        for (const auto& p : all) {
            if (!s.pieces_.empty() && p.lo <= s.pieces_.back().hi)
                s.pieces_.back().hi = std::max(s.pieces_.back().hi, p.hi);
            else
                s.pieces_.push_back(p);
        }
        return s;
    }

    ArcSet subtract(const ArcSet& o) const { return intersect(o.complement()); }

    /// this ⊇ o
    bool includes(const ArcSet& o) const { return o.subtract(*this).empty(); }

    bool intersects(const Arc& a) const {
        std::vector<Piece> parts;
        append_arc(parts, a);
        for (const auto& p : parts) {
            auto it = std::upper_bound(pieces_.begin(), pieces_.end(), p.lo,
                                       [](u128 val, const Piece& q) { return val < q.lo; });
            if (it != pieces_.begin() && std::prev(it)->hi > p.lo) return true;
            if (it != pieces_.end() && it->lo < p.hi) return true;
        }
        return false;
    }

    /// Maps an offset in [0, measure) onto the set, walking pieces in order.
    CirclePoint point_at(u128 offset) const {
        for (const auto& p : pieces_) {
            u128 len = p.hi - p.lo;
            if (offset < len) return CirclePoint::from_raw(p.lo + offset);
            offset -= len;
        }
        fail(ErrorKind::Precondition, "offset beyond the measure of the set");
    }

    friend bool operator==(const ArcSet&, const ArcSet&) = default;

private:
    static void append_arc(std::vector<Piece>& out, const Arc& a) {
        require(a.length > 0 && a.length <= kOne, "arc length must be in (0, 1]");
        u128 lo = a.start.raw();
        u128 hi = lo + a.length;
        if (hi <= kOne) {
            out.push_back({lo, hi});
        } else {
            out.push_back({lo, kOne});
            out.push_back({0, hi - kOne});
        }
    }

    std::vector<Piece> pieces_;
};

} // namespace birkhoff_lab
