#pragma once

// Random step functions on K equal arcs, the ergodic-parameter set E_O, and
// the ramp smoothing that turns a zero-mean step function into a continuous one.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "birkhoff_lab/arcs.hpp"
#include "birkhoff_lab/cf_arith.hpp"
#include "birkhoff_lab/error.hpp"
#include "birkhoff_lab/piecewise.hpp"
#include "birkhoff_lab/rng.hpp"

namespace birkhoff_lab {

/// Piecewise-constant function whose pieces [lo, hi) tile [0, 1) in order.
class StepFunction {
public:
    struct Piece {
        u128 lo = 0, hi = 0;
        double value = 0.0;
    };

    StepFunction() : StepFunction(std::vector<Piece>{Piece{0, kOne, 0.0}}) {}

    explicit StepFunction(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
        require(!pieces_.empty(), "step function needs at least one piece");
        u128 at = 0;
        for (const auto& p : pieces_) {
            require(p.lo == at && p.hi > p.lo, "step pieces must tile [0, 1) in order");
            at = p.hi;
        }
        require(at == kOne, "step pieces must end at 1");
        his_.reserve(pieces_.size());
        for (const auto& p : pieces_) his_.push_back(p.hi);
    }

    const std::vector<Piece>& pieces() const { return pieces_; }

    std::size_t piece_index(CirclePoint x) const {
        return static_cast<std::size_t>(std::upper_bound(his_.begin(), his_.end(), x.raw()) - his_.begin());
    }

    double operator()(CirclePoint x) const { return pieces_[piece_index(x)].value; }

    double sup_norm() const {
        double s = 0.0;
        for (const auto& p : pieces_) s = std::max(s, std::abs(p.value));
        return s;
    }

    /// Mean computed by grouping lengths per |value| with exact signed sums,
    /// so balanced +v/-v pieces cancel exactly.
    double mean() const {
        std::map<std::uint64_t, BigInt> net;
        for (const auto& p : pieces_) {
            if (p.value == 0.0) continue;
            BigInt len = detail::from_u128(p.hi - p.lo);
            auto& slot = net[detail::bits_of(std::abs(p.value))];
            if (p.value > 0) slot += len;
            else slot -= len;
        }
        detail::CompensatedSum sum;
        for (const auto& [bits, len] : net) {
            if (len == 0) continue;
            const double v = std::bit_cast<double>(bits);
            const long double frac = static_cast<long double>(len) / static_cast<long double>(detail::from_u128(kOne));
            sum.add(frac * v);
        }
        return static_cast<double>(sum.value());
    }

private:
    std::vector<Piece> pieces_;
    std::vector<u128> his_;
};

struct RademacherStepSpec {
    std::uint64_t K = 0;
    std::uint64_t N = 0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::vector<int> signs;        // X_1..X_K as +-1
    std::vector<u128> boundaries;  // A_k = [boundaries[k], boundaries[k+1]), k = 0..K-1
    ArcSet ergodic_set;            // E_O: ||k u|| > 1/K for 1 <= k <= N
    double measure_lower_bound = 0.0;  // max(0, 1 - 2N^2/K)

    std::size_t arc_index(CirclePoint x) const {
        auto it = std::upper_bound(boundaries.begin(), boundaries.end(), x.raw());
        return static_cast<std::size_t>(it - boundaries.begin()) - 1;
    }

    /// Whether x, x+u, ..., x+(N-1)u land in pairwise distinct arcs A_k.
    bool visits_distinct_arcs(CirclePoint u, CirclePoint x) const {
        std::vector<std::size_t> idx;
        idx.reserve(N);
        for (std::uint64_t j = 0; j < N; ++j, x += u) idx.push_back(arc_index(x));
        std::sort(idx.begin(), idx.end());
        return std::adjacent_find(idx.begin(), idx.end()) == idx.end();
    }
};

struct RademacherStep {
    StepFunction g;
    RademacherStepSpec spec;
};

/// {u : ||k u|| <= 1/K for some 1 <= k <= N}, rounded outward by a few grid units.
inline ArcSet small_multiple_set(std::uint64_t K, std::uint64_t N) {
    require(K >= 2 && N >= 1, "need K >= 2 and N >= 1");
    std::vector<Arc> arcs;
    arcs.reserve(N * (N + 1) / 2);
    for (std::uint64_t k = 1; k <= N; ++k) {
        const u128 base = kOne / k, rem = kOne % k;
        const u128 half = kOne / (static_cast<u128>(k) * K) + 3;
        for (std::uint64_t i = 0; i < k; ++i) {
            const u128 center = static_cast<u128>(i) * base + static_cast<u128>(i) * rem / k;
            arcs.push_back(Arc{CirclePoint::from_raw(center - half), 2 * half + 1});
        }
    }
    return ArcSet::from_arcs(arcs);
}

/// g = eps X_k on the first half of A_k and -eps X_k on the second.
inline RademacherStep build_rademacher_step(std::uint64_t K, std::uint64_t N, double epsilon, std::uint64_t seed,
                                            double measure_budget = 1.0) {
    require(K >= 2 && K <= (std::uint64_t{1} << 26), "K must be in [2, 2^26]");
    require(N >= 1 && N <= 4096, "N must be in [1, 4096]");
    require(epsilon >= 0.0, "eps must be non-negative");
    RademacherStepSpec spec;
    spec.K = K;
    spec.N = N;
    spec.epsilon = epsilon;
    spec.seed = seed;
    spec.boundaries.resize(K + 1);
    const u128 half_one = kOne / 2;
    for (std::uint64_t k = 0; k <= K; ++k)
        spec.boundaries[k] = 2 * (static_cast<u128>(k) * (half_one / K) + static_cast<u128>(k) * (half_one % K) / K);
    auto gen = make_stream(seed, 0);
    spec.signs.resize(K);
    for (auto& s : spec.signs) s = rademacher(gen);

    std::vector<StepFunction::Piece> pieces;
    pieces.reserve(2 * K);
    for (std::uint64_t k = 0; k < K; ++k) {
        const u128 lo = spec.boundaries[k], hi = spec.boundaries[k + 1];
        const u128 mid = lo + (hi - lo) / 2;
        const double v = epsilon * spec.signs[k];
        pieces.push_back({lo, mid, v});
        pieces.push_back({mid, hi, -v});
    }

    spec.ergodic_set = small_multiple_set(K, N).complement();
    spec.measure_lower_bound =
        std::max(0.0, 1.0 - 2.0 * static_cast<double>(N) * static_cast<double>(N) / static_cast<double>(K));
    const double measure = spec.ergodic_set.measure_double();
    if (measure < 1.0 - measure_budget)
        fail(ErrorKind::InsufficientK, "measure(E_O) = " + std::to_string(measure) + " is below 1 - budget; raise K");
    return RademacherStep{StepFunction(std::move(pieces)), std::move(spec)};
}

struct SmoothStep {
    PiecewiseFn f;
    u128 ramp_width = 0;
    std::size_t jumps = 0;
    bool bump = false;
    u128 bump_width = 0;
    double bump_height = 0.0;
    u128 changed_measure = 0;  // measure of {f != g} is at most this
};

/// Replaces each jump of g by a linear ramp centred on it, with total ramp
/// measure at most delta/2. Centred ramps keep the mean; any rounding residual
/// is removed by a triangular bump of width <= delta/2 in the longest constant run.
inline SmoothStep smooth_step(const StepFunction& g, double delta) {
    require(delta > 0.0 && delta <= 1.0, "delta must be in (0, 1]");
    const double sup = g.sup_norm();
    require(std::abs(g.mean()) <= std::ldexp(std::max(sup, 1.0), -100), "step function must have zero mean");

    struct Run {
        u128 lo, len;
        double value;
    };
    std::vector<Run> runs;
    for (const auto& p : g.pieces()) {
        if (!runs.empty() && runs.back().value == p.value) runs.back().len += p.hi - p.lo;
        else runs.push_back({p.lo, p.hi - p.lo, p.value});
    }
    if (runs.size() > 1 && runs.front().value == runs.back().value) {
        runs.back().len += runs.front().len;
        runs.erase(runs.begin());
    }

    SmoothStep out;
    std::vector<Segment> segs;
    if (runs.size() == 1) {
        segs.push_back(Segment::constant(CirclePoint{}, kOne, runs.front().value));
        out.f = PiecewiseFn(std::move(segs));
        return out;
    }

    out.jumps = runs.size();  // one jump at the start of every run
    u128 min_len = kOne;
    for (const auto& r : runs) min_len = std::min(min_len, r.len);
    u128 w = fraction_from_long_double(static_cast<long double>(delta) / 2.0L) / out.jumps;
    w = std::min(w, min_len) & ~u128{1};
    require(w > 0, "delta too small for the ramps on the fixed-point grid");
    out.ramp_width = w;

    const std::size_t R = runs.size();
    std::size_t longest = 0;
    for (std::size_t i = 0; i < R; ++i) {
        const Run& prev = runs[(i + R - 1) % R];
        const Run& r = runs[i];
        segs.push_back(Segment::affine(CirclePoint::from_raw(r.lo - w / 2), w, prev.value, r.value));
        segs.push_back(Segment::constant(CirclePoint::from_raw(r.lo + w / 2), r.len - w, r.value));
        if (r.len > runs[longest].len) longest = i;
    }
    out.changed_measure = w * out.jumps;
    PiecewiseFn f(segs);

    const double residual = f.mean();
    if (std::abs(residual) > std::ldexp(1.0, -111)) {
        const std::size_t seg_index = 2 * longest + 1;
        const Segment flat = segs[seg_index];
        if (fraction_to_double(flat.length) <= delta)
            fail(ErrorKind::NoRoomForBump, "no constant run longer than delta for the mean correction");
        u128 wb = std::min(fraction_from_long_double(static_cast<long double>(delta) / 2.0L), flat.length / 2) & ~u128{1};
        const double height = -2.0 * residual / fraction_to_double(wb);
        const double v = flat.left;
        if (std::abs(v + height) > 2.0 * sup)
            fail(ErrorKind::InvariantViolation, "mean-correction bump would exceed 2 sup|g|");
        const u128 before = (flat.length - wb) / 2;
        segs[seg_index] = Segment::constant(flat.start, before, v);
        segs.push_back(Segment::affine(flat.start.advanced(before), wb / 2, v, v + height));
        segs.push_back(Segment::affine(flat.start.advanced(before + wb / 2), wb / 2, v + height, v));
        segs.push_back(Segment::constant(flat.start.advanced(before + wb), flat.length - before - wb, v));
        f = PiecewiseFn(segs);
        out.bump = true;
        out.bump_width = wb;
        out.bump_height = height;
        out.changed_measure += wb;
    }
    out.f = std::move(f);
    return out;
}

} // namespace birkhoff_lab
