#pragma once

// Continuous plateau functions: +-eps on whole tower arcs, so Birkhoff sums
// of length m stay at m*eps on a large set.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "birkhoff_lab/arcs.hpp"
#include "birkhoff_lab/cf_arith.hpp"
#include "birkhoff_lab/cover.hpp"
#include "birkhoff_lab/gauge.hpp"
#include "birkhoff_lab/piecewise.hpp"
#include "birkhoff_lab/tower_partition.hpp"

namespace birkhoff_lab {

struct PlateauOptions {
    double epsilon = 0.1;
    double C = 1.0;
    GrowthGauge gauge = GrowthGauge::power_law(0.5);
    std::uint64_t min_m = 1;
    std::optional<double> eta;  // ramp width; chosen from the budget when absent
    double s = 0.5;             // Hausdorff exponent of the cover bound
    double delta = 0.5;         // mesh
    double budget = 0.5;        // target for the cover pre-measure
    std::uint64_t arc_budget = kDefaultArcBudget;
};

struct PlateauSpec {
    CirclePoint alpha;
    std::string alpha_text;
    int precision = kDefaultPrecision;
    std::size_t level = 0;
    double epsilon = 0.0;
    double C = 0.0;
    std::string gauge;
    std::uint64_t m = 0;
    u128 eta = 0;
    std::uint64_t q_n = 0, q_next = 0;        // q_n, q_{n+1}
    std::uint64_t even_n = 0, even_next = 0;  // 2 floor(q/2)
    u128 d_n = 0, d_next = 0;
    double s = 0.5, delta = 0.5, budget = 0.5;
    double cover_bound = 0.0;  // (2m+2) d_n^s + (2m+2) d_{n+1}^s + 2(q~_{n+1} + q~_n) eta^s
    ArcSet good_set;
};

struct PlateauBuild {
    PiecewiseFn f;
    PlateauSpec spec;
};

/// Smallest m >= min_m with m * eps > C * psi(m).
inline std::uint64_t plateau_sum_length(double epsilon, double C, const GrowthGauge& gauge, std::uint64_t min_m = 1,
                                        std::uint64_t limit = 1'000'000'000) {
    require(epsilon > 0.0 && C > 0.0, "eps and C must be positive");
    for (std::uint64_t m = std::max<std::uint64_t>(min_m, 1); m <= limit; ++m)
        if (static_cast<double>(m) * epsilon > C * gauge(m)) return m;
    fail(ErrorKind::BudgetExceeded, "no sum length m satisfies m eps > C psi(m)");
}

namespace detail {

struct PlateauLevel {
    std::uint64_t q_n, q_next, even_n, even_next;
    u128 d_n, d_next, eta;
    double cover_bound;
};

/// Checks a level against the sum-length and cover preconditions; returns a
/// reason when the level is too small.
inline std::optional<PlateauLevel> plateau_level(const RotationNumber& alpha, std::size_t n, std::uint64_t m,
                                                 const PlateauOptions& opt, std::string& why) {
    auto q = denominators(alpha, n + 1);
    PlateauLevel L{};
    L.q_n = q[n];
    L.q_next = q[n + 1];
    L.even_n = L.q_n & ~std::uint64_t{1};
    L.even_next = L.q_next & ~std::uint64_t{1};
    if (4 * m >= std::min(L.even_n, L.even_next)) {
        why = "need 2m < min(q~_n, q~_{n+1})/2";
        return std::nullopt;
    }
    L.d_n = tower_base_arc(alpha, n, L.q_n).length;
    L.d_next = tower_base_arc(alpha, n + 1, L.q_next).length;
    const double s = opt.s;
    const double dn = fraction_to_double(L.d_n), dnext = fraction_to_double(L.d_next);
    if (dn > opt.delta) {
        why = "tower arcs exceed the mesh";
        return std::nullopt;
    }
    const double towers = (2.0 * m + 2.0) * (std::pow(dn, s) + std::pow(dnext, s));
    const double ramps = 2.0 * static_cast<double>(L.even_next + L.even_n);
    if (opt.eta) {
        L.eta = fraction_from_long_double(*opt.eta);
        if (L.eta == 0 || 4 * L.eta >= L.d_next) {
            why = "ramp width must satisfy 0 < eta < d_{n+1}/4";
            return std::nullopt;
        }
    } else {
        if (towers >= opt.budget) {
            why = "tower part of the cover bound exceeds the budget";
            return std::nullopt;
        }
        double room = 0.5 * (opt.budget - towers) / ramps;
        u128 by_budget = fraction_from_long_double(std::pow(static_cast<long double>(room), 1.0L / s));
        L.eta = std::min<u128>(L.d_next / 8, by_budget);
        if (L.eta == 0) {
            why = "ramp width underflows the fixed-point grid";
            return std::nullopt;
        }
    }
    L.cover_bound = towers + ramps * std::pow(fraction_to_double(L.eta), s);
    if (!(L.cover_bound < opt.budget)) {
        why = "cover bound " + std::to_string(L.cover_bound) + " is not below the budget";
        return std::nullopt;
    }
    return L;
}

} // namespace detail

/// Plateau function at tower level n. Each arc of the two families (up to the
/// even truncation) carries +eps on its first half of indices and -eps on the
/// second, with linear ramps of width eta at both ends.
inline PlateauBuild build_plateau(const RotationNumber& alpha, std::size_t n, const PlateauOptions& opt = {}) {
    require(opt.epsilon > 0.0, "eps must be positive");
    const std::uint64_t m = plateau_sum_length(opt.epsilon, opt.C, opt.gauge, opt.min_m);
    std::string why;
    auto level = detail::plateau_level(alpha, n, m, opt, why);
    if (!level) fail(ErrorKind::LevelTooSmall, "level " + std::to_string(n) + " too small: " + why);
    if (level->q_n + level->q_next > opt.arc_budget)
        fail(ErrorKind::BudgetExceeded, "plateau level " + std::to_string(n) + " exceeds the arc budget");

    PlateauSpec spec;
    spec.alpha = alpha.value();
    spec.alpha_text = alpha.source().text;
    spec.precision = alpha.precision();
    spec.level = n;
    spec.epsilon = opt.epsilon;
    spec.C = opt.C;
    spec.gauge = opt.gauge.describe();
    spec.m = m;
    spec.eta = level->eta;
    spec.q_n = level->q_n;
    spec.q_next = level->q_next;
    spec.even_n = level->even_n;
    spec.even_next = level->even_next;
    spec.d_n = level->d_n;
    spec.d_next = level->d_next;
    spec.s = opt.s;
    spec.delta = opt.delta;
    spec.budget = opt.budget;
    spec.cover_bound = level->cover_bound;

    const u128 eta = level->eta;
    std::vector<Segment> segs;
    segs.reserve(3 * (level->even_n + level->even_next));
    std::vector<Arc> good;
    good.reserve(level->even_n + level->even_next);
    const CirclePoint step = alpha.value();
    for (std::size_t fam = 0; fam < 2; ++fam) {
        const std::size_t lvl = n + fam;
        const std::uint64_t count = fam == 0 ? level->even_next : level->even_n;
        const u128 d = fam == 0 ? level->d_n : level->d_next;
        const std::uint64_t half = count / 2;
        CirclePoint a = tower_base_arc(alpha, lvl, fam == 0 ? level->q_n : level->q_next).start;
        for (std::uint64_t j = 0; j < count; ++j, a += step) {
            const double v = j < half ? opt.epsilon : -opt.epsilon;
            segs.push_back(Segment::affine(a, eta, 0.0, v));
            segs.push_back(Segment::constant(a.advanced(eta), d - 2 * eta, v));
            segs.push_back(Segment::affine(a.advanced(d - eta), eta, v, 0.0));
            const bool keep = j < half ? j + m < half : j + m < count;
            if (keep) good.push_back(Arc{a.advanced(eta), d - 2 * eta});
        }
    }
    PlateauBuild out{PiecewiseFn(std::move(segs)), std::move(spec)};
    out.spec.good_set = ArcSet::from_arcs(good);
    if (std::abs(out.f.mean()) > std::ldexp(1.0, -alpha.precision() + 16))
        fail(ErrorKind::InvariantViolation, "plateau function is not zero-mean");
    return out;
}

/// Raises the level from n_min until every precondition holds.
inline PlateauBuild build_plateau_auto(const RotationNumber& alpha, std::size_t n_min, const PlateauOptions& opt = {}) {
    const std::uint64_t m = plateau_sum_length(opt.epsilon, opt.C, opt.gauge, opt.min_m);
    for (std::size_t n = std::max<std::size_t>(n_min, 1);; ++n) {
        auto q = denominators(alpha, n + 1);
        if (q[n] + q[n + 1] > opt.arc_budget)
            fail(ErrorKind::BudgetExceeded, "no admissible plateau level within the arc budget");
        std::string why;
        if (detail::plateau_level(alpha, n, m, opt, why)) return build_plateau(alpha, n, opt);
    }
}

/// The three interval classes covering the complement of the good set.
inline std::vector<CoverClass> plateau_cover_classes(const PlateauSpec& spec) {
    std::vector<CoverClass> out;
    const CirclePoint step = spec.alpha;
    CoverClass ramps{"ramps", {}, 2 * (spec.even_next + spec.even_n), spec.eta};
    for (std::size_t fam = 0; fam < 2; ++fam) {
        const std::uint64_t total = fam == 0 ? spec.q_next : spec.q_n;
        const std::uint64_t count = fam == 0 ? spec.even_next : spec.even_n;
        const u128 d = fam == 0 ? spec.d_n : spec.d_next;
        const std::uint64_t half = count / 2;
        const std::uint64_t qlvl = fam == 0 ? spec.q_n : spec.q_next;
        const std::size_t lvl = spec.level + fam;
        CirclePoint frac = spec.alpha.times(qlvl);
        CirclePoint a = lvl % 2 == 0 ? CirclePoint{} : frac;
        CoverClass towers{fam == 0 ? "tower arcs, level n" : "tower arcs, level n+1", {}, 2 * spec.m + 2, d};
        for (std::uint64_t j = 0; j < total; ++j, a += step) {
            const bool kept = j < count && (j < half ? j + spec.m < half : j + spec.m < count);
            if (!kept) towers.arcs.push_back(Arc{a, d});
            if (j < count) {
                ramps.arcs.push_back(Arc{a, spec.eta});
                ramps.arcs.push_back(Arc{a.advanced(d - spec.eta), spec.eta});
            }
        }
        out.push_back(std::move(towers));
    }
    out.push_back(std::move(ramps));
    return out;
}

} // namespace birkhoff_lab
