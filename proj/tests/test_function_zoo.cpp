#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "birkhoff_lab/birkhoff.hpp"
#include "birkhoff_lab/function_zoo.hpp"
#include "birkhoff_lab/tower_partition.hpp"

using namespace birkhoff_lab;

namespace {

CirclePoint at(double x) { return CirclePoint::from_double(x); }

CirclePoint random_point(std::mt19937_64& gen) { return CirclePoint::from_raw(static_cast<u128>(gen()) << 64 | gen()); }

// Uniform point of a non-empty arc set.
CirclePoint random_point_in(const ArcSet& set, std::mt19937_64& gen) {
    const u128 m = set.measure();
    const u128 r = (static_cast<u128>(gen()) << 64 | gen()) % m;
    return set.point_at(r);
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorKind::InvariantViolation;
}

const PlateauBuild& golden_plateau() {
    static const PlateauBuild build = [] {
        PlateauOptions opt;
        opt.epsilon = 0.1;
        opt.C = 1.0;
        opt.gauge = GrowthGauge::power_law(0.5);
        return build_plateau_auto(RotationNumber::golden(), 5, opt);
    }();
    return build;
}

const HolderBuild& golden_holder() {
    static const HolderBuild build = [] {
        HolderOptions opt;
        opt.xi = 0.25;
        opt.nu = 0.25;
        opt.A = 2.0;
        opt.require_cover = false;
        return build_holder(RotationNumber::golden(), opt);
    }();
    return build;
}

const NoncoboundaryBuild& golden_noncoboundary() {
    static const NoncoboundaryBuild build = build_noncoboundary(RotationNumber::golden(), NoncoboundaryOptions{});
    return build;
}

} // namespace

// ---------------------------------------------------------------------------
// Plateau

TEST(Plateau, SumLengthIsMinimal) {
    const auto gauge = GrowthGauge::power_law(0.5);
    const std::uint64_t m = plateau_sum_length(0.1, 1.0, gauge);
    EXPECT_EQ(m, 101u);
    for (std::uint64_t k = 1; k < m; ++k) EXPECT_LE(0.1 * static_cast<double>(k), std::sqrt(static_cast<double>(k)));
}

TEST(Plateau, SmallLevelRejected) {
    PlateauOptions opt;
    EXPECT_EQ(kind_of([&] { build_plateau(RotationNumber::golden(), 5, opt); }), ErrorKind::LevelTooSmall);
}

TEST(Plateau, SumsOnGoodSetAreExactlyPlusMinusMEps) {
    const auto& b = golden_plateau();
    const auto golden = RotationNumber::golden();
    EXPECT_EQ(b.spec.m, 101u);
    EXPECT_EQ(b.spec.level, 27u);
    EXPECT_LT(4 * b.spec.eta, b.spec.d_next);
    EXPECT_EQ(b.f.mean(), 0.0);
    EXPECT_NEAR(b.f.sup_norm(), 0.1, 1e-17);

    auto partition = TowerPartition::build(golden, b.spec.level);
    std::mt19937_64 gen(2024);
    const double target = static_cast<double>(b.spec.m) * b.spec.epsilon;
    for (int i = 0; i < 100; ++i) {
        const CirclePoint x = random_point_in(b.spec.good_set, gen);
        const double s = birkhoff_sum(b.f, golden.value(), x, b.spec.m);
        EXPECT_NEAR(std::abs(s), target, 1e-9 * static_cast<double>(b.spec.m));
        // f(x + j alpha) = f(x) along the sum: the orbit climbs one tower
        auto loc = partition.locate(x);
        const double fx = b.f(x);
        CirclePoint p = x;
        for (std::uint64_t j = 0; j < b.spec.m; ++j, p += golden.value()) {
            auto lj = partition.locate(p);
            ASSERT_EQ(lj.level, loc.level);
            ASSERT_EQ(lj.index, loc.index + j);
            ASSERT_EQ(b.f(p), fx);
        }
    }
}

TEST(Plateau, OffPlateauSumsBoundedBySupNorm) {
    const auto& b = golden_plateau();
    const auto golden = RotationNumber::golden();
    std::mt19937_64 gen(5);
    const ArcSet bad = b.spec.good_set.complement();
    for (int i = 0; i < 50; ++i) {
        const CirclePoint x = random_point_in(bad, gen);
        EXPECT_LE(std::abs(birkhoff_sum(b.f, golden.value(), x, b.spec.m)),
                  static_cast<double>(b.spec.m) * b.spec.epsilon * (1 + 1e-12));
    }
}

TEST(Plateau, GrowthRatioAtDesignedLength) {
    const auto& b = golden_plateau();
    const auto golden = RotationNumber::golden();
    std::mt19937_64 gen(8);
    const CirclePoint x = random_point_in(b.spec.good_set, gen);
    auto series = birkhoff_series(b.f, golden, x, b.spec.m);
    auto r = growth_report(series, GrowthGauge::power_law(0.5));
    const double m = static_cast<double>(b.spec.m);
    EXPECT_GE(r.max_ratio, b.spec.epsilon * std::pow(m, 0.5) * (1 - 1e-12));
}

// ---------------------------------------------------------------------------
// Holder

TEST(Holder, ClosedFormExponents) {
    const double xi = 0.25, nu_prime = 0.5;
    const double delta0 = std::sqrt(xi / (1 - nu_prime));
    EXPECT_NEAR(delta0, 0.70711, 1e-5);
    EXPECT_NEAR(1 / delta0, 1.41421, 1e-5);
    const auto& spec = golden_holder().spec;
    EXPECT_NEAR(spec.delta0, std::sqrt(spec.xi / (1 - spec.nu_prime)), 1e-15);
    EXPECT_NEAR(spec.gamma0 * spec.delta0, 1.0, 1e-15);
    EXPECT_GT(spec.nu_prime, spec.nu);
    EXPECT_LT(spec.nu_prime + spec.xi, 1.0);
    EXPECT_LT(spec.delta0, spec.s);
}

TEST(Holder, GoldenIsCaseTwo) {
    // tau_n = ln q_{n+2} / ln q_n tends to 1 for golden alpha, below sqrt(3)
    const auto& spec = golden_holder().spec;
    EXPECT_EQ(spec.case_tag, HolderCase::Two);
    EXPECT_LT(spec.tau, std::sqrt((1 - spec.nu) / spec.xi));
    EXPECT_LT(spec.tau_n, std::sqrt((1 - spec.nu_prime) / spec.xi));
    EXPECT_LT(spec.delta1, 1.0);
}

TEST(Holder, NormsAndSeminorm) {
    const auto& b = golden_holder();
    EXPECT_LE(b.f.sup_norm(), 1.0);
    EXPECT_LE(b.f.lip_seminorm(0.25), 1.0);
    EXPECT_LE(b.spec.lip, 1.0);
    EXPECT_NEAR(b.f.mean(), 0.0, std::ldexp(1.0, -111));
}

TEST(Holder, SumsOnGoodSetsExceedTarget) {
    const auto& b = golden_holder();
    const auto golden = RotationNumber::golden();
    std::mt19937_64 gen(77);
    const double t0 = b.spec.A * std::pow(static_cast<double>(b.spec.m0), b.spec.nu);
    const double t1 = b.spec.A * std::pow(static_cast<double>(b.spec.m1), b.spec.nu);
    for (int i = 0; i < 50; ++i) {
        const CirclePoint x0 = random_point_in(b.spec.good0, gen);
        EXPECT_GE(std::abs(birkhoff_sum(b.f, golden.value(), x0, b.spec.m0)), t0);
        const CirclePoint x1 = random_point_in(b.spec.good1, gen);
        EXPECT_GE(std::abs(birkhoff_sum(b.f, golden.value(), x1, b.spec.m1)), t1);
    }
}

TEST(Holder, CoverSearchExhaustedWhenRequired) {
    HolderOptions opt;
    opt.xi = 0.25;
    opt.nu = 0.25;
    opt.A = 2.0;
    opt.arc_budget = 200'000;
    EXPECT_EQ(kind_of([&] { build_holder(RotationNumber::golden(), opt); }), ErrorKind::CaseSearchExhausted);
}

TEST(Holder, InvalidParameters) {
    HolderOptions opt;
    opt.xi = 0.6;
    opt.nu = 0.5;
    EXPECT_EQ(kind_of([&] { build_holder(RotationNumber::golden(), opt); }), ErrorKind::Precondition);
    HolderOptions low_s;
    low_s.s = 0.5;  // below sqrt(1/3)
    EXPECT_EQ(kind_of([&] { build_holder(RotationNumber::golden(), low_s); }), ErrorKind::Precondition);
}

// ---------------------------------------------------------------------------
// Rademacher steps and smoothing

TEST(Rademacher, ErgodicSetMeasureAndMembership) {
    auto step = build_rademacher_step(4096, 32, 1.0, 1);
    const auto& spec = step.spec;
    EXPECT_FALSE(spec.ergodic_set.contains(CirclePoint{}));
    EXPECT_EQ(spec.measure_lower_bound, 0.5);
    EXPECT_GE(spec.ergodic_set.measure_double(), 0.5);
    // Independent oracle: ||k u|| > 1/K checked directly at random u.
    std::mt19937_64 gen(3);
    std::uint64_t inside = 0;
    const int samples = 100000;
    for (int i = 0; i < samples; ++i) {
        const CirclePoint u = random_point(gen);
        bool ok = true;
        for (std::uint64_t k = 1; k <= 32 && ok; ++k) {
            const u128 d = circle_distance(u.times(k), CirclePoint{});
            ok = static_cast<long double>(d) * 4096.0L > static_cast<long double>(kOne);
        }
        inside += ok;
        EXPECT_EQ(spec.ergodic_set.contains(u), ok);
    }
    const double p = static_cast<double>(inside) / samples;
    EXPECT_NEAR(spec.ergodic_set.measure_double(), p, 4 * std::sqrt(p * (1 - p) / samples));
}

TEST(Rademacher, StepStructure) {
    auto step = build_rademacher_step(1024, 16, 0.5, 9);
    const auto& spec = step.spec;
    EXPECT_EQ(step.g.mean(), 0.0);
    EXPECT_EQ(step.g.sup_norm(), 0.5);
    ASSERT_EQ(step.g.pieces().size(), 2 * spec.K);
    for (std::uint64_t k = 0; k < spec.K; ++k) {
        const auto& b = step.g.pieces()[2 * k];
        const auto& bp = step.g.pieces()[2 * k + 1];
        EXPECT_EQ(b.hi - b.lo, bp.hi - bp.lo);
        EXPECT_EQ(b.value, -bp.value);
        EXPECT_EQ(b.value, 0.5 * spec.signs[k]);
    }
    EXPECT_EQ(spec.boundaries.front(), 0u);
    EXPECT_EQ(spec.boundaries.back(), kOne);
}

TEST(Rademacher, DistinctArcsAlongErgodicOrbits) {
    auto step = build_rademacher_step(4096, 32, 1.0, 2);
    std::mt19937_64 gen(4);
    for (int i = 0; i < 1000; ++i) {
        const CirclePoint u = random_point_in(step.spec.ergodic_set, gen);
        EXPECT_TRUE(step.spec.visits_distinct_arcs(u, random_point(gen)));
    }
    // u = 1/K revisits neighbouring arcs only, but u = 0 stays in one arc
    EXPECT_FALSE(step.spec.visits_distinct_arcs(CirclePoint{}, at(0.3)));
}

TEST(Rademacher, InsufficientK) {
    EXPECT_EQ(kind_of([] { build_rademacher_step(64, 32, 1.0, 1, 0.1); }), ErrorKind::InsufficientK);
}

TEST(SmoothStep, HalfAndHalf) {
    StepFunction g({{0, kOne / 2, 1.0}, {kOne / 2, kOne, -1.0}});
    auto s = smooth_step(g, 0.01);
    EXPECT_LE(std::abs(s.f.mean()), std::ldexp(1.0, -127 + 16));
    EXPECT_LE(fraction_to_double(s.changed_measure), 0.01);
    EXPECT_LE(s.f.sup_norm(), 2.0);
    EXPECT_EQ(s.jumps, 2u);
    EXPECT_EQ(s.f(at(0.25)), 1.0);
    EXPECT_EQ(s.f(at(0.75)), -1.0);
    EXPECT_NEAR(s.f(at(0.5)), 0.0, 1e-12);
}

TEST(SmoothStep, ZeroAndRademacher) {
    auto zero = smooth_step(StepFunction(), 0.01);
    EXPECT_EQ(zero.f(at(0.4)), 0.0);
    EXPECT_EQ(zero.f.sup_norm(), 0.0);

    auto step = build_rademacher_step(256, 4, 1.0, 5);
    auto s = smooth_step(step.g, 0.02);
    EXPECT_LE(std::abs(s.f.mean()), std::ldexp(1.0, -111));
    EXPECT_LE(s.f.sup_norm(), 2.0);
    EXPECT_LE(fraction_to_double(s.changed_measure), 0.02);
    // f = g away from the ramps
    std::mt19937_64 gen(6);
    std::uint64_t differ = 0;
    const int samples = 20000;
    for (int i = 0; i < samples; ++i) {
        CirclePoint x = random_point(gen);
        differ += s.f(x) != step.g(x);
    }
    EXPECT_LE(static_cast<double>(differ) / samples, 0.02 + 4 * std::sqrt(0.02 / samples));
}

TEST(SmoothStep, NonZeroMeanRejected) {
    StepFunction g({{0, kOne / 2, 1.0}, {kOne / 2, kOne, 0.0}});
    EXPECT_EQ(kind_of([&] { smooth_step(g, 0.01); }), ErrorKind::Precondition);
}

// ---------------------------------------------------------------------------
// Trigonometric transfer

TEST(Transfer, CosineOnGolden) {
    auto golden = RotationNumber::golden();
    TrigPolynomial h({{1, {0.5, 0.0}}});
    auto t = trig_coboundary_transfer(h, golden.value());
    const double a = (std::sqrt(5.0) - 1.0) / 2.0;
    const double expected = 0.5 / (2.0 * std::sin(std::numbers::pi * a));
    EXPECT_NEAR(std::abs(t.g.coefficients().at(1)), expected, 1e-12);
    EXPECT_LT(t.identity_error, 1e-9);
    EXPECT_NEAR(t.bound, 4.0 * expected, 1e-12);
    for (int i = 0; i < 20; ++i) {
        auto series = birkhoff_series(h, golden, at(i / 20.0), 10000);
        EXPECT_LE(series.running_max.back(), t.bound * (1 + 1e-9));
    }
}

TEST(Transfer, ZeroAndSmallDenominator) {
    auto golden = RotationNumber::golden();
    auto zero = trig_coboundary_transfer(TrigPolynomial({{3, {0.0, 0.0}}}), golden.value());
    EXPECT_EQ(zero.bound, 0.0);
    EXPECT_EQ(std::abs(zero.g.coefficients().at(3)), 0.0);
    EXPECT_EQ(kind_of([] { trig_coboundary_transfer(TrigPolynomial({{4, {1.0, 0.0}}}), at(0.25)); }),
              ErrorKind::SmallDenominator);
}

// ---------------------------------------------------------------------------
// Non-coboundary

TEST(Noncoboundary, GreedyStagesOnGolden) {
    const auto& b = golden_noncoboundary();
    EXPECT_EQ(b.spec.breakpoints(), (std::vector<std::uint64_t>{1, 144, 17711, 2178309}));
    for (const auto& st : b.spec.stages) {
        EXPECT_TRUE(st.disjoint);
        EXPECT_TRUE(st.measure_ok);
        EXPECT_TRUE(st.mass_ok);
        EXPECT_GT(static_cast<double>(st.indices.size()), 0.99 * static_cast<double>(st.n_end));
        EXPECT_LT(fraction_to_double(st.measure), std::pow(100.0, -static_cast<double>(st.k + 2)));
        EXPECT_GT(static_cast<double>(st.indices.size()) * st.height, 0.99 * static_cast<double>(st.k));
    }
}

TEST(Noncoboundary, IntervalsPairwiseDisjoint) {
    const auto& b = golden_noncoboundary();
    u128 sum = 0;
    std::vector<Arc> arcs;
    for (const auto& st : b.spec.stages)
        for (std::uint64_t j : st.indices) {
            arcs.push_back(detail::noncoboundary_interval(b.spec.alpha.times(j), st.h));
            sum += arcs.back().length;
        }
    EXPECT_EQ(ArcSet::from_arcs(arcs).measure(), sum);
}

TEST(Noncoboundary, BlockSumsAndGrowth) {
    const auto& b = golden_noncoboundary();
    const CirclePoint alpha = b.spec.alpha;
    for (const auto& st : b.spec.stages) {
        detail::CompensatedSum s;
        for (std::uint64_t j : st.indices) s.add(b.f(alpha.times(j)));
        EXPECT_NEAR(static_cast<double>(s.value()), static_cast<double>(st.indices.size()) * st.height, 1e-9);
        EXPECT_GT(static_cast<double>(s.value()), 0.9 * static_cast<double>(st.k));
    }
    auto bp = b.spec.breakpoints();
    auto blocks = block_sums(b.f, alpha, CirclePoint{}, bp);
    ASSERT_EQ(blocks.size(), 3u);
    for (std::size_t k = 0; k < blocks.size(); ++k) EXPECT_GT(blocks[k], 0.9 * static_cast<double>(k + 1));
    EXPECT_EQ(b.f.mean(), 0.0);
}

TEST(Noncoboundary, SeminormIsTwoToOneMinusXi) {
    // The zero-mean bump rises to +H and falls to -H over 2h, so the pair of
    // extremes alone gives 2H / (2h)^xi = 2^{1-xi}.
    const auto& b = golden_noncoboundary();
    EXPECT_NEAR(b.f.lip_seminorm(b.spec.xi), std::pow(2.0, 1.0 - b.spec.xi), 1e-9);
}

TEST(Noncoboundary, DeeperStagesUnreachable) {
    NoncoboundaryOptions opt;
    opt.depth = 4;
    EXPECT_EQ(kind_of([&] { build_noncoboundary(RotationNumber::golden(), opt); }), ErrorKind::DepthUnreachable);
}
