#pragma once

// Cover audits for the plateau and Holder constructions, and a finite-horizon
// slow-set sampler with a box-counting heuristic.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "birkhoff_lab/arcs.hpp"
#include "birkhoff_lab/birkhoff.hpp"
#include "birkhoff_lab/cover.hpp"
#include "birkhoff_lab/gauge.hpp"
#include "birkhoff_lab/parallel.hpp"
#include "birkhoff_lab/zoo_holder.hpp"
#include "birkhoff_lab/zoo_plateau.hpp"

namespace birkhoff_lab {

struct AuditedClass {
    std::string name;
    std::uint64_t count = 0;
    std::uint64_t count_bound = 0;
    u128 nominal_length = 0;
    double pre_measure = 0.0;
};

struct CoverAudit {
    std::vector<AuditedClass> classes;
    double s = 0.0, delta = 0.0, budget = 0.0;
    double pre_measure = 0.0;
    bool pass = false;
};

/// Checks the classes against the stored good set, class by class, and sums
/// |I|^s over every interval.
inline CoverAudit audit_cover_classes(const std::vector<CoverClass>& classes, const ArcSet& good, double s,
                                      double delta, double budget) {
    CoverAudit audit;
    audit.s = s;
    audit.delta = delta;
    audit.budget = budget;
    std::vector<Arc> all;
    for (const auto& c : classes) {
        AuditedClass a;
        a.name = c.name;
        a.count = c.arcs.size();
        a.count_bound = c.count_bound;
        a.nominal_length = c.nominal_length;
        if (a.count > a.count_bound)
            fail(ErrorKind::CoverMismatch, c.name + ": " + std::to_string(a.count) + " intervals exceed the bound " +
                                               std::to_string(a.count_bound));
        std::vector<double> lengths;
        lengths.reserve(c.arcs.size());
        for (const auto& arc : c.arcs) {
            if (arc.length > c.nominal_length)
                fail(ErrorKind::CoverMismatch, c.name + ": interval longer than its nominal length");
            lengths.push_back(fraction_to_double(arc.length));
        }
        a.pre_measure = pre_measure(lengths, s, delta);
        audit.pre_measure += a.pre_measure;
        all.insert(all.end(), c.arcs.begin(), c.arcs.end());
        audit.classes.push_back(std::move(a));
    }
    if (!(ArcSet::from_arcs(all) == good.complement()))
        fail(ErrorKind::CoverMismatch, "cover classes do not tile the complement of the good set");
    audit.pass = audit.pre_measure < budget;
    return audit;
}

inline CoverAudit construction_cover_audit(const PlateauSpec& spec, double s, double delta, double budget) {
    return audit_cover_classes(plateau_cover_classes(spec), spec.good_set, s, delta, budget);
}

inline CoverAudit construction_cover_audit(const HolderSpec& spec, double s, double delta, double budget) {
    return audit_cover_classes(holder_cover_classes(spec), spec.good_set(), s, delta, budget);
}

// ---------------------------------------------------------------------------
// Slow-set sampling

struct BoxCountFit {
    bool undefined = true;  // no slow cells
    double dimension = 0.0; // least-squares slope of log2(count) against j
    double residual = 0.0;  // RMS of the fit in log2 units
    std::size_t j_min = 0, j_max = 0;
    std::vector<std::uint64_t> counts;  // boxes of size 2^-j meeting the slow set, j = j_min..j_max
};

/// Box counts over a 2^-log2_grid cell grid at scales 2^-j_min..2^-j_max.
inline BoxCountFit box_count(const std::vector<std::uint8_t>& flagged, std::size_t j_min = 6, std::size_t j_max = 16) {
    const std::uint64_t grid = flagged.size();
    require(grid >= 2 && std::has_single_bit(grid), "grid size must be a power of two");
    const std::size_t log2_grid = static_cast<std::size_t>(std::countr_zero(grid));
    BoxCountFit fit;
    fit.j_min = std::min(j_min, log2_grid);
    fit.j_max = std::min(j_max, log2_grid);
    if (std::none_of(flagged.begin(), flagged.end(), [](std::uint8_t v) { return v != 0; })) return fit;
    fit.undefined = false;
    for (std::size_t j = fit.j_min; j <= fit.j_max; ++j) {
        const std::size_t shift = log2_grid - j;
        std::uint64_t count = 0;
        std::uint64_t last = ~std::uint64_t{0};
        for (std::uint64_t i = 0; i < grid; ++i)
            if (flagged[i] && (i >> shift) != last) {
                last = i >> shift;
                ++count;
            }
        fit.counts.push_back(count);
    }
    const std::size_t m = fit.counts.size();
    if (m < 2) {
        fit.dimension = std::log2(static_cast<double>(fit.counts.front())) / static_cast<double>(fit.j_min);
        return fit;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = static_cast<double>(fit.j_min + i), y = std::log2(static_cast<double>(fit.counts[i]));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double md = static_cast<double>(m);
    fit.dimension = (md * sxy - sx * sy) / (md * sxx - sx * sx);
    const double intercept = (sy - fit.dimension * sx) / md;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = static_cast<double>(fit.j_min + i);
        const double e = std::log2(static_cast<double>(fit.counts[i])) - (intercept + fit.dimension * x);
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / md);
    return fit;
}

struct SlowSetSample {
    std::uint64_t grid = 0;
    double threshold = 0.0;
    std::uint64_t M = 0, N = 0;
    std::vector<std::uint8_t> slow;  // per cell: max_{M<=n<=N} |S_n f(center)| / psi(n) <= B
    std::vector<double> ratio;       // that maximum per cell
    std::uint64_t slow_count = 0;
    ArcSet slow_cells;               // union of the slow cells
    BoxCountFit fit;                 // heuristic, not a Hausdorff dimension
};

inline constexpr long double kSlowSetBudget = 4e9L;

template <CircleFunction F>
SlowSetSample slow_set_sample(const F& f, const RotationNumber& alpha, const GrowthGauge& gauge, double threshold,
                              std::uint64_t M, std::uint64_t N, std::uint64_t grid, unsigned threads = 0,
                              std::size_t j_min = 6, std::size_t j_max = 16) {
    require(M >= 1 && N >= M, "need 1 <= M <= N");
    require(grid >= 2 && grid <= (std::uint64_t{1} << 24) && std::has_single_bit(grid),
            "grid must be a power of two in [2, 2^24]");
    if (N > 1'000'000 || static_cast<long double>(N) * grid > kSlowSetBudget)
        fail(ErrorKind::BudgetExceeded, "slow-set sampling exceeds its evaluation budget");
    std::vector<double> psi(N + 1);
    for (std::uint64_t n = M; n <= N; ++n) psi[n] = gauge(n);

    SlowSetSample out;
    out.grid = grid;
    out.threshold = threshold;
    out.M = M;
    out.N = N;
    out.slow.assign(grid, 0);
    out.ratio.assign(grid, 0.0);
    const u128 cell = kOne / grid;
    const CirclePoint step = alpha.value();
    parallel_for(grid, threads, [&](std::size_t i) {
        CirclePoint p = CirclePoint::from_raw(cell * i + cell / 2);
        detail::CompensatedSum acc;
        double worst = 0.0;
        for (std::uint64_t n = 1; n <= N; ++n) {
            acc.add(f(p));
            p += step;
            if (n >= M) worst = std::max(worst, std::abs(static_cast<double>(acc.value())) / psi[n]);
        }
        out.ratio[i] = worst;
        out.slow[i] = worst <= threshold;
    });
    std::vector<Arc> arcs;
    for (std::uint64_t i = 0; i < grid; ++i)
        if (out.slow[i]) {
            ++out.slow_count;
            arcs.push_back(Arc{CirclePoint::from_raw(cell * i), cell});
        }
    out.slow_cells = ArcSet::from_arcs(arcs);
    out.fit = box_count(out.slow, j_min, j_max);
    return out;
}

} // namespace birkhoff_lab
