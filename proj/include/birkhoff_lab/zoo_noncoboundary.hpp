#pragma once

// A Holder function whose Birkhoff sums at 0 grow without bound: stage k puts
// small zero-mean bumps peaking at j alpha for almost every j in [n_k, n_{k+1}).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "birkhoff_lab/arcs.hpp"
#include "birkhoff_lab/cf_arith.hpp"
#include "birkhoff_lab/error.hpp"
#include "birkhoff_lab/piecewise.hpp"

namespace birkhoff_lab {

struct NoncoboundaryOptions {
    double xi = 0.2;
    std::size_t depth = 3;
    std::uint64_t max_index = 10'000'000;  // largest admissible n_{k+1}
    bool scale_separation = false;         // also demand h_k < 0.0005^(1/xi) h_{k-1}
};

struct NoncoboundaryStage {
    std::size_t k = 0;
    std::uint64_t n_start = 0, n_end = 0;  // [n_k, n_{k+1})
    u128 h = 0;                            // h_k on the grid
    double height = 0.0;                   // bump peak h_k^xi
    std::vector<std::uint64_t> indices;    // J_k
    u128 measure = 0;                      // total measure of the stage's closed intervals
    double measure_bound = 0.0;            // 100^-(k+2)
    double mass = 0.0;                     // m_k h_k^xi
    bool disjoint = false;
    bool measure_ok = false;
    bool mass_ok = false;     // m_k h_k^xi > 0.99 k
    bool separation_ok = false;
};

struct NoncoboundarySpec {
    CirclePoint alpha;
    std::string alpha_text;
    int precision = kDefaultPrecision;
    double xi = 0.0;
    bool scale_separation = false;
    std::vector<NoncoboundaryStage> stages;
    std::vector<std::uint64_t> breakpoints() const {  // n_1, ..., n_{K+1}
        std::vector<std::uint64_t> out;
        if (stages.empty()) return out;
        out.push_back(stages.front().n_start);
        for (const auto& s : stages) out.push_back(s.n_end);
        return out;
    }
};

struct NoncoboundaryBuild {
    PiecewiseFn f;
    NoncoboundarySpec spec;
};

namespace detail {

inline Arc noncoboundary_interval(CirclePoint center, u128 h) {
    return Arc::closed(CirclePoint::from_raw(center.raw() - h), center.advanced(3 * h));
}

/// Stage k with n_{k+1} = candidate: J_k and the stage checks.
inline NoncoboundaryStage noncoboundary_stage(const RotationNumber& alpha, std::size_t k, std::uint64_t n_start,
                                              std::uint64_t candidate, double xi, const ArcSet& taken,
                                              u128 previous_h, bool need_separation) {
    NoncoboundaryStage st;
    st.k = k;
    st.n_start = n_start;
    st.n_end = candidate;
    const long double kd = static_cast<long double>(k);
    st.h = fraction_from_long_double(std::pow(kd / static_cast<long double>(candidate), 1.0L / xi));
    if (st.h == 0) return st;
    st.height = std::pow(fraction_to_double(st.h), xi) * (1.0 - 8 * std::numeric_limits<double>::epsilon());
    st.measure_bound = std::pow(100.0, -static_cast<double>(k + 2));
    st.separation_ok = previous_h == 0 ||
                       fraction_to_long_double(st.h) < std::pow(0.0005L, 1.0L / xi) * fraction_to_long_double(previous_h);
    if (need_separation && !st.separation_ok) return st;

    const CirclePoint step = alpha.value();
    CirclePoint c = step.times(n_start);
    for (std::uint64_t j = n_start; j < candidate; ++j, c += step)
        if (!taken.intersects(noncoboundary_interval(c, st.h))) st.indices.push_back(j);
    const std::uint64_t m = st.indices.size();
    st.measure = static_cast<u128>(m) * (4 * st.h + 1);
    st.mass = static_cast<double>(m) * st.height;
    st.mass_ok = st.mass > 0.99 * static_cast<double>(k);
    st.measure_ok = fraction_to_double(st.measure) < st.measure_bound;
    return st;
}

} // namespace detail

/// Greedy stage selection: n_{k+1} is the smallest convergent denominator for
/// which the maximal J_k has m_k > 0.99 n_{k+1} and measure below 100^-(k+2).
inline NoncoboundaryBuild build_noncoboundary(const RotationNumber& alpha, const NoncoboundaryOptions& opt = {}) {
    require(opt.xi > 0.0 && opt.xi < 1.0, "xi must be in (0, 1)");
    require(opt.depth >= 1, "depth must be >= 1");
    NoncoboundarySpec spec;
    spec.alpha = alpha.value();
    spec.alpha_text = alpha.source().text;
    spec.precision = alpha.precision();
    spec.xi = opt.xi;
    spec.scale_separation = opt.scale_separation;

    std::vector<std::uint64_t> q;
    for (std::size_t depth = 8;; depth += 8) {
        q = denominators(alpha, depth);
        if (q.back() > opt.max_index || depth > 200) break;
    }

    ArcSet taken;
    std::uint64_t n_start = 1;
    u128 previous_h = 0;
    std::vector<Segment> segs;
    const CirclePoint step = alpha.value();
    for (std::size_t k = 1; k <= opt.depth; ++k) {
        std::optional<NoncoboundaryStage> chosen;
        for (std::uint64_t candidate : q) {
            if (candidate <= n_start) continue;
            if (candidate > opt.max_index) break;
            auto st = detail::noncoboundary_stage(alpha, k, n_start, candidate, opt.xi, taken, previous_h,
                                                  opt.scale_separation);
            const std::uint64_t m = st.indices.size();
            if (m > 0 && static_cast<double>(m) > 0.99 * static_cast<double>(candidate) && st.measure_ok) {
                chosen = std::move(st);
                break;
            }
        }
        if (!chosen) fail(ErrorKind::DepthUnreachable, "no admissible n_{k+1} for stage " + std::to_string(k) +
                                                           " below " + std::to_string(opt.max_index));

        NoncoboundaryStage& st = *chosen;
        std::vector<Arc> arcs;
        arcs.reserve(st.indices.size());
        const u128 h = st.h;
        const double H = st.height;
        for (std::uint64_t j : st.indices) {
            const CirclePoint c = step.times(j);
            arcs.push_back(detail::noncoboundary_interval(c, h));
            segs.push_back(Segment::affine(CirclePoint::from_raw(c.raw() - h), h, 0.0, H));
            segs.push_back(Segment::affine(c, h, H, 0.0));
            segs.push_back(Segment::affine(c.advanced(h), h, 0.0, -H));
            segs.push_back(Segment::affine(c.advanced(2 * h), h, -H, 0.0));
        }
        ArcSet stage_set = ArcSet::from_arcs(arcs);
        st.disjoint = stage_set.measure() == st.measure && stage_set.intersect(taken).empty();
        if (!st.disjoint) fail(ErrorKind::InvariantViolation, "stage intervals overlap");
        taken = taken.unite(stage_set);
        previous_h = h;
        n_start = st.n_end;
        spec.stages.push_back(std::move(st));
    }
    return NoncoboundaryBuild{PiecewiseFn(std::move(segs)), std::move(spec)};
}

} // namespace birkhoff_lab
