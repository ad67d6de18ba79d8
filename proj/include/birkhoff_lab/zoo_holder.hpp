#pragma once

// Holder functions made of power cusps on tower arcs, with large Birkhoff
// sums on the arcs' trimmed interiors.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "birkhoff_lab/arcs.hpp"
#include "birkhoff_lab/cf_arith.hpp"
#include "birkhoff_lab/cover.hpp"
#include "birkhoff_lab/piecewise.hpp"
#include "birkhoff_lab/tower_partition.hpp"

namespace birkhoff_lab {

enum class HolderCase { One, Two };

inline std::string to_string(HolderCase c) { return c == HolderCase::One ? "one" : "two"; }

struct HolderOptions {
    double xi = 0.25;
    double nu = 0.25;
    double A = 2.0;
    std::optional<double> s;         // default sqrt(xi/(1-nu)) + 0.05
    double delta = 0.05;             // mesh
    double budget = 0.05;            // target for the cover pre-measure
    std::uint64_t min_m = 1;
    std::optional<double> nu_prime;  // default: midpoint of the admissible interval
    std::size_t n_min = 2;
    std::size_t tau_depth = 40;
    std::size_t tau_window = 5;
    std::uint64_t arc_budget = 3'000'000;
    bool require_cover = true;  // if false, fall back to the level with the smallest cover bound
};

struct HolderSpec {
    CirclePoint alpha;
    std::string alpha_text;
    int precision = kDefaultPrecision;
    double xi = 0, nu = 0, nu_prime = 0, A = 0, s = 0, delta = 0, budget = 0;
    HolderCase case_tag = HolderCase::One;
    double tau = 0;    // trailing-window estimate of liminf tau_n
    double tau_n = 0;  // at the chosen level
    std::size_t level = 0;
    double delta0 = 0, gamma0 = 0, delta1 = 0, gamma1 = 0;
    std::uint64_t m0 = 0, m1 = 0;
    u128 trim0 = 0, trim1 = 0;  // Gamma_j = (a_j + trim0, b_j - trim0), Theta_j likewise
    double amplitude = 0;       // cusp scale
    double lip = 0;             // certified Lip_xi bound of the built function
    std::uint64_t q_n = 0, q_next = 0, even_n = 0, even_next = 0;
    u128 d_n = 0, d_next = 0;
    double cover_bound = 0;     // sum of |I|^s over the cover classes
    bool cover_ok = false;
    ArcSet good0, good1;

    ArcSet good_set() const { return good0.unite(good1); }
};

struct HolderBuild {
    PiecewiseFn f;
    HolderSpec spec;
};

/// Tent of cusps on [a, a + d): scale (x - a)^xi on the left half and
/// scale (a + d - x)^xi on the right half.
inline void append_cusp_tent(std::vector<Segment>& segs, CirclePoint a, u128 d, double scale, double xi) {
    const u128 left = d / 2;
    segs.push_back(Segment::cusp(a, left, scale, xi, +1));
    segs.push_back(Segment::cusp(a.advanced(left), d - left, scale, xi, -1));
}

/// Cusp tents on the first even_count arcs of the level-n family (and of the
/// level-(n+1) family when both_families), signed + on the first half of
/// indices and - on the second.
inline PiecewiseFn holder_tents(const RotationNumber& alpha, std::size_t n, double xi, double scale, bool both_families) {
    auto q = denominators(alpha, n + 1);
    std::vector<Segment> segs;
    const CirclePoint step = alpha.value();
    for (std::size_t fam = 0; fam < (both_families ? 2u : 1u); ++fam) {
        const std::size_t lvl = n + fam;
        const std::uint64_t qlvl = q[lvl];
        const std::uint64_t count = (fam == 0 ? q[n + 1] : q[n]) & ~std::uint64_t{1};
        const Arc base = tower_base_arc(alpha, lvl, qlvl);
        CirclePoint a = base.start;
        for (std::uint64_t j = 0; j < count; ++j, a += step)
            append_cusp_tent(segs, a, base.length, j < count / 2 ? scale : -scale, xi);
    }
    return PiecewiseFn(std::move(segs));
}

/// Rescales a tent function so that its certified Lip_xi bound is at most 1.
inline PiecewiseFn holder_tents_normalised(const RotationNumber& alpha, std::size_t n, double xi, bool both_families,
                                           double& scale_out, double& lip_out) {
    PiecewiseFn unit = holder_tents(alpha, n, xi, 1.0, both_families);
    double lip1 = unit.lip_seminorm(xi);
    double scale = lip1 > 0 ? (1.0 / lip1) * (1.0 - 8 * std::numeric_limits<double>::epsilon()) : 1.0;
    scale = std::min(scale, 1.0);
    PiecewiseFn f = holder_tents(alpha, n, xi, scale, both_families);
    double lip = f.lip_seminorm(xi);
    if (lip > 1.0) fail(ErrorKind::InvariantViolation, "normalised tent function has Lip_xi > 1");
    scale_out = scale;
    lip_out = lip;
    return f;
}

namespace detail {

struct HolderLevel {
    bool sums_ok = false;
    std::string why;
    double tau_n = 0, delta1 = 0, gamma1 = 0;
    std::uint64_t q_n = 0, q_next = 0, m0 = 0, m1 = 0;
    u128 d_n = 0, d_next = 0, trim0 = 0, trim1 = 0;
    double cover = std::numeric_limits<double>::infinity();
    bool mesh_ok = false;
};

inline u128 ceil_fraction(long double x) {
    u128 v = fraction_from_long_double(x);
    return v + 1;
}

/// Smallest trim t with m * c * t^xi >= A * m^nu, together with the proof's
/// own trim d^gamma.
inline u128 holder_trim(u128 d, double gamma, std::uint64_t m, double A, double nu, double xi, double c_lower) {
    long double by_proof = std::pow(fraction_to_long_double(d), static_cast<long double>(gamma));
    long double by_sum = std::pow(static_cast<long double>(A) * std::pow(static_cast<long double>(m), nu - 1.0L) / c_lower,
                                  1.0L / xi) * (1.0L + 1e-9L);
    return std::max(ceil_fraction(by_proof), ceil_fraction(by_sum));
}

inline HolderLevel holder_level(const RotationNumber& alpha, std::size_t n, HolderCase c, double xi, double nu,
                                double nu_prime, double A, double s, double mesh, std::uint64_t min_m) {
    HolderLevel L;
    auto q = denominators(alpha, n + 2);
    L.q_n = q[n];
    L.q_next = q[n + 1];
    if (L.q_n < 2) {
        L.why = "q_n < 2";
        return L;
    }
    L.tau_n = detail::bigint_log(BigInt(q[n + 2])) / detail::bigint_log(BigInt(q[n]));
    const double delta0 = std::sqrt(xi / (1.0 - nu_prime));
    const double gamma0 = 1.0 / delta0;
    L.d_n = tower_base_arc(alpha, n, L.q_n).length;
    L.d_next = tower_base_arc(alpha, n + 1, L.q_next).length;
    const double c_lower = std::pow(2.0, xi - 1.0) * (1.0 - 64 * std::numeric_limits<double>::epsilon());
    const std::uint64_t even_next = L.q_next & ~std::uint64_t{1};
    const std::uint64_t even_n = L.q_n & ~std::uint64_t{1};

    L.m0 = static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(L.q_next), delta0)));
    if (L.m0 < std::max<std::uint64_t>(min_m, 1)) { L.why = "m0 below the minimum sum length"; return L; }
    if (L.m0 >= even_next / 2) { L.why = "m0 leaves no good arcs"; return L; }
    L.trim0 = holder_trim(L.d_n, gamma0, L.m0, A, nu, xi, c_lower);
    if (2 * L.trim0 >= L.d_n) { L.why = "trim swallows the level-n arcs"; return L; }

    double cover = 0.0;
    const double dn = fraction_to_double(L.d_n), dnext = fraction_to_double(L.d_next);
    double longest = dn;
    auto term = [s](double len, double count) { return count * std::pow(len, s); };
    cover += term(dn, 2.0 * L.m0 + static_cast<double>(L.q_next - even_next));
    cover += term(fraction_to_double(L.trim0), 2.0 * static_cast<double>(even_next - 2 * L.m0));
    if (c == HolderCase::One) {
        cover += term(dnext, static_cast<double>(L.q_n));
    } else {
        if (!(L.tau_n < std::sqrt((1.0 - nu_prime) / xi))) { L.why = "tau_n violates the case-two bound"; return L; }
        L.delta1 = std::sqrt(L.tau_n) * delta0;
        if (!(L.delta1 < 1.0)) { L.why = "delta_1 >= 1"; return L; }
        L.gamma1 = 1.0 / L.delta1;
        L.m1 = static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(L.q_n), L.delta1)));
        if (L.m1 < std::max<std::uint64_t>(min_m, 1)) { L.why = "m1 below the minimum sum length"; return L; }
        if (L.m1 >= even_n / 2) { L.why = "m1 leaves no good arcs"; return L; }
        L.trim1 = holder_trim(L.d_next, L.gamma1, L.m1, A, nu, xi, c_lower);
        if (2 * L.trim1 >= L.d_next) { L.why = "trim swallows the level-(n+1) arcs"; return L; }
        cover += term(dnext, 2.0 * L.m1 + static_cast<double>(L.q_n - even_n));
        cover += term(fraction_to_double(L.trim1), 2.0 * static_cast<double>(even_n - 2 * L.m1));
    }
    L.sums_ok = true;
    L.mesh_ok = longest <= mesh;
    L.cover = cover;
    return L;
}

} // namespace detail

/// Admissible interval (nu, upper) for nu'; the upper end combines
/// xi + nu' < 1, sqrt(xi/(1-nu')) < s, and in case two tau < sqrt((1-nu')/xi).
inline std::pair<double, double> holder_nu_prime_interval(double xi, double nu, double s, HolderCase c, double tau) {
    double upper = std::min(1.0 - xi, 1.0 - xi / (s * s));
    if (c == HolderCase::Two) upper = std::min(upper, 1.0 - xi * tau * tau);
    return {nu, upper};
}

inline HolderBuild build_holder(const RotationNumber& alpha, const HolderOptions& opt = {}) {
    const double xi = opt.xi, nu = opt.nu;
    require(xi > 0.0 && xi < 1.0 && nu > 0.0 && nu < 1.0, "xi and nu must be in (0, 1)");
    require(nu + xi < 1.0, "need nu + xi < 1");
    require(opt.A > 0.0, "A must be positive");
    const double s = opt.s.value_or(std::sqrt(xi / (1.0 - nu)) + 0.05);
    require(s > std::sqrt(xi / (1.0 - nu)) && s <= 1.0, "need sqrt(xi/(1-nu)) < s <= 1");

    HolderSpec spec;
    spec.alpha = alpha.value();
    spec.alpha_text = alpha.source().text;
    spec.precision = alpha.precision();
    spec.xi = xi; spec.nu = nu; spec.A = opt.A; spec.s = s; spec.delta = opt.delta; spec.budget = opt.budget;

    TypeExponents te = type_exponents(alpha, opt.tau_depth, opt.tau_window);
    spec.tau = te.liminf;
    spec.case_tag = spec.tau >= std::sqrt((1.0 - nu) / xi) ? HolderCase::One : HolderCase::Two;
    auto [lo, hi] = holder_nu_prime_interval(xi, nu, s, spec.case_tag, spec.tau);
    if (!(hi > lo)) fail(ErrorKind::Precondition, "no admissible nu' for these parameters");
    spec.nu_prime = opt.nu_prime.value_or(0.5 * (lo + hi));
    require(spec.nu_prime > lo && spec.nu_prime < hi, "nu' outside its admissible interval");
    spec.delta0 = std::sqrt(xi / (1.0 - spec.nu_prime));
    spec.gamma0 = 1.0 / spec.delta0;

    std::optional<std::size_t> chosen, fallback;
    double fallback_cover = std::numeric_limits<double>::infinity();
    double tau_lo = std::numeric_limits<double>::infinity(), tau_hi = 0.0;
    detail::HolderLevel pick;
    for (std::size_t n = std::max<std::size_t>(opt.n_min, 1);; ++n) {
        auto q = denominators(alpha, n + 1);
        if (q[n] + q[n + 1] > opt.arc_budget) break;
        auto L = detail::holder_level(alpha, n, spec.case_tag, xi, nu, spec.nu_prime, opt.A, s, opt.delta, opt.min_m);
        if (L.tau_n > 0) { tau_lo = std::min(tau_lo, L.tau_n); tau_hi = std::max(tau_hi, L.tau_n); }
        if (!L.sums_ok) continue;
        if (L.mesh_ok && L.cover < opt.budget) { chosen = n; pick = L; break; }
        if (L.mesh_ok && L.cover < fallback_cover) { fallback = n; fallback_cover = L.cover; }
    }
    if (!chosen) {
        if (opt.require_cover || !fallback)
            fail(ErrorKind::CaseSearchExhausted,
                 "no level within the arc budget meets the cover budget (case " + to_string(spec.case_tag) +
                     ", tau_n in [" + std::to_string(tau_lo) + ", " + std::to_string(tau_hi) + "], best cover bound " +
                     std::to_string(fallback_cover) + ")");
        chosen = fallback;
        pick = detail::holder_level(alpha, *fallback, spec.case_tag, xi, nu, spec.nu_prime, opt.A, s, opt.delta, opt.min_m);
    }

    const std::size_t n = *chosen;
    spec.level = n;
    spec.tau_n = pick.tau_n;
    spec.delta1 = pick.delta1;
    spec.gamma1 = pick.gamma1;
    spec.m0 = pick.m0;
    spec.m1 = pick.m1;
    spec.trim0 = pick.trim0;
    spec.trim1 = pick.trim1;
    spec.q_n = pick.q_n;
    spec.q_next = pick.q_next;
    spec.even_n = pick.q_n & ~std::uint64_t{1};
    spec.even_next = pick.q_next & ~std::uint64_t{1};
    spec.d_n = pick.d_n;
    spec.d_next = pick.d_next;
    spec.cover_bound = pick.cover;
    spec.cover_ok = pick.cover < opt.budget;

    const bool both = spec.case_tag == HolderCase::Two;
    double scale = 0, lip = 0;
    PiecewiseFn f = holder_tents_normalised(alpha, n, xi, both, scale, lip);
    spec.amplitude = scale;
    spec.lip = lip;
    if (scale < std::pow(2.0, xi - 1.0) * (1.0 - 64 * std::numeric_limits<double>::epsilon()))
        fail(ErrorKind::InvariantViolation, "cusp amplitude below the value used for the trims");

    const CirclePoint step = alpha.value();
    auto good_arcs = [&](std::size_t lvl, std::uint64_t count, u128 d, u128 trim, std::uint64_t m, std::uint64_t qlvl) {
        std::vector<Arc> arcs;
        const std::uint64_t half = count / 2;
        CirclePoint a = tower_base_arc(alpha, lvl, qlvl).start;
        for (std::uint64_t j = 0; j < count; ++j, a += step) {
            const bool keep = j < half ? j + m < half : j + m < count;
            if (keep) arcs.push_back(Arc{a.advanced(trim), d - 2 * trim});
        }
        return ArcSet::from_arcs(arcs);
    };
    spec.good0 = good_arcs(n, spec.even_next, spec.d_n, spec.trim0, spec.m0, spec.q_n);
    if (both) spec.good1 = good_arcs(n + 1, spec.even_n, spec.d_next, spec.trim1, spec.m1, spec.q_next);
    return HolderBuild{std::move(f), std::move(spec)};
}

/// Interval classes covering the complement of E_0 (and E_1 in case two).
inline std::vector<CoverClass> holder_cover_classes(const HolderSpec& spec) {
    std::vector<CoverClass> out;
    const CirclePoint step = spec.alpha;
    auto family = [&](std::size_t fam, std::uint64_t m, u128 trim, bool populated) {
        const std::size_t lvl = spec.level + fam;
        const std::uint64_t total = fam == 0 ? spec.q_next : spec.q_n;
        const std::uint64_t count = fam == 0 ? spec.even_next : spec.even_n;
        const u128 d = fam == 0 ? spec.d_n : spec.d_next;
        const std::uint64_t qlvl = fam == 0 ? spec.q_n : spec.q_next;
        const std::uint64_t half = count / 2;
        CirclePoint frac = spec.alpha.times(qlvl);
        CirclePoint a = lvl % 2 == 0 ? CirclePoint{} : frac;
        const std::string tag = fam == 0 ? "level n" : "level n+1";
        CoverClass towers{"tower arcs, " + tag, {}, populated ? 2 * m + 2 : total, d};
        CoverClass trims{"trims, " + tag, {}, 2 * total, trim};
        for (std::uint64_t j = 0; j < total; ++j, a += step) {
            const bool kept = populated && j < count && (j < half ? j + m < half : j + m < count);
            if (!kept) {
                towers.arcs.push_back(Arc{a, d});
            } else {
                trims.arcs.push_back(Arc{a, trim});
                trims.arcs.push_back(Arc{a.advanced(d - trim), trim});
            }
        }
        out.push_back(std::move(towers));
        if (populated) out.push_back(std::move(trims));
    };
    family(0, spec.m0, spec.trim0, true);
    family(1, spec.m1, spec.trim1, spec.case_tag == HolderCase::Two);
    return out;
}

} // namespace birkhoff_lab
