#pragma once

// The two-tower partition of T attached to consecutive convergent denominators.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "birkhoff_lab/arcs.hpp"
#include "birkhoff_lab/cf_arith.hpp"
#include "birkhoff_lab/error.hpp"

namespace birkhoff_lab {

inline constexpr std::uint64_t kDefaultArcBudget = 10'000'000;

/// B_n = [0, {q_n alpha}) for even n, [{q_n alpha}, 1) for odd n.
inline Arc tower_base_arc(const RotationNumber& alpha, std::size_t n, std::uint64_t qn) {
    CirclePoint frac = alpha.value().times(qn);
    if (frac.raw() == 0) fail(ErrorKind::PrecisionExhausted, "q_n alpha is an integer at this precision");
    if (n % 2 == 0) return Arc{CirclePoint{}, frac.raw()};
    return Arc{frac, kOne - frac.raw()};
}

/// The arcs R^j(B_n), 0 <= j < q_{n+1}, and R^j(B_{n+1}), 0 <= j < q_n, where
/// B_n = [0, {q_n alpha}) for even n and [{q_n alpha}, 1) for odd n.
class TowerPartition {
public:
    struct Location {
        std::size_t level;    // n or n + 1
        std::uint64_t index;  // j
        friend bool operator==(const Location&, const Location&) = default;
    };

    static TowerPartition build(const RotationNumber& alpha, std::size_t n,
                                std::uint64_t arc_budget = kDefaultArcBudget) {
        require(n >= 1, "partition level must be >= 1");
        auto q = denominators(alpha, n + 1);
        TowerPartition p;
        p.alpha_ = alpha.value();
        p.level_ = n;
        p.q_n_ = q[n];
        p.q_next_ = q[n + 1];
        if (p.q_n_ + p.q_next_ > arc_budget)
            fail(ErrorKind::BudgetExceeded, "partition at level " + std::to_string(n) + " needs " +
                                                std::to_string(p.q_n_ + p.q_next_) + " arcs");
        p.base_[0] = tower_base_arc(alpha, n, p.q_n_);
        p.base_[1] = tower_base_arc(alpha, n + 1, p.q_next_);
        p.index_arcs();
        p.verify();
        return p;
    }

    std::size_t level() const { return level_; }
    std::uint64_t q_n() const { return q_n_; }
    std::uint64_t q_next() const { return q_next_; }

    /// Number of arcs in the family at `level` (n -> q_{n+1}, n+1 -> q_n).
    std::uint64_t family_size(std::size_t level) const {
        return family(level) == 0 ? q_next_ : q_n_;
    }
    /// Even truncation 2*floor(count/2) of a family.
    std::uint64_t even_count(std::size_t level) const { return family_size(level) & ~std::uint64_t{1}; }

    u128 d(std::size_t level) const { return base_[family(level)].length; }
    double d_double(std::size_t level) const { return fraction_to_double(d(level)); }

    Arc base(std::size_t level) const { return base_[family(level)]; }

    Arc arc(std::size_t level, std::uint64_t j) const {
        require(j < family_size(level), "arc index out of range");
        const Arc& b = base_[family(level)];
        return Arc{b.start + alpha_.times(j), b.length};
    }

    std::size_t arc_count() const { return starts_.size(); }

    Location locate(CirclePoint x) const {
        auto it = std::upper_bound(starts_.begin(), starts_.end(), x.raw());
        std::size_t pos = it == starts_.begin() ? starts_.size() - 1
                                                : static_cast<std::size_t>(it - starts_.begin()) - 1;
        return decode(ids_[pos]);
    }

    /// Arcs of one family, in index order.
    std::vector<Arc> family_arcs(std::size_t level) const {
        std::vector<Arc> out;
        std::uint64_t count = family_size(level);
        out.reserve(count);
        Arc a = base(level);
        for (std::uint64_t j = 0; j < count; ++j) {
            out.push_back(a);
            a.start += alpha_;
        }
        return out;
    }

    /// All arcs sorted by start, with their (level, index) labels.
    std::vector<std::pair<Arc, Location>> sorted_arcs() const {
        std::vector<std::pair<Arc, Location>> out;
        out.reserve(starts_.size());
        for (std::size_t i = 0; i < starts_.size(); ++i) {
            Location loc = decode(ids_[i]);
            out.push_back({Arc{CirclePoint::from_raw(starts_[i]), d(loc.level)}, loc});
        }
        return out;
    }

private:
    std::size_t family(std::size_t level) const {
        require(level == level_ || level == level_ + 1, "level must be n or n + 1");
        return level - level_;
    }

    Location decode(std::uint64_t id) const {
        return Location{level_ + static_cast<std::size_t>(id >> 63), id & ~(std::uint64_t{1} << 63)};
    }

    void index_arcs() {
        const std::size_t total = q_n_ + q_next_;
        std::vector<u128> starts(total);
        std::vector<std::uint64_t> ids(total);
        std::size_t k = 0;
        for (std::size_t fam = 0; fam < 2; ++fam) {
            std::uint64_t count = fam == 0 ? q_next_ : q_n_;
            CirclePoint s = base_[fam].start;
            for (std::uint64_t j = 0; j < count; ++j, ++k) {
                starts[k] = s.raw();
                ids[k] = j | (static_cast<std::uint64_t>(fam) << 63);
                s += alpha_;
            }
        }
        std::vector<std::uint32_t> order(total);
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return starts[a] < starts[b]; });
        starts_.resize(total);
        ids_.resize(total);
        for (std::size_t i = 0; i < total; ++i) {
            starts_[i] = starts[order[i]];
            ids_[i] = ids[order[i]];
        }
    }

    void verify() const {
        // Consecutive sorted arcs must abut, cyclically, so the lengths sum to 1.
        u128 total = 0;
        for (std::size_t i = 0; i < starts_.size(); ++i) {
            u128 len = d(decode(ids_[i]).level);
            u128 next = starts_[(i + 1) % starts_.size()];
            if (((starts_[i] + len) & kMask) != next)
                fail(ErrorKind::PartitionGap, "tower arcs do not tile the circle at level " + std::to_string(level_));
            total += len;
        }
        if (total != kOne) fail(ErrorKind::PartitionGap, "tower arcs do not have total measure 1");
        // 1/(2 q_{n+1}) <= d_n <= 1/q_{n+1}
        BigInt dn = detail::from_u128(base_[0].length);
        BigInt one = detail::from_u128(kOne);
        if (2 * q_next_ * dn < one || q_next_ * dn > one)
            fail(ErrorKind::InvariantViolation, "d_n violates 1/(2q_{n+1}) <= d_n <= 1/q_{n+1}");
    }

    CirclePoint alpha_;
    std::size_t level_ = 0;
    std::uint64_t q_n_ = 0, q_next_ = 0;
    Arc base_[2];
    std::vector<u128> starts_;
    std::vector<std::uint64_t> ids_;
};

} // namespace birkhoff_lab
