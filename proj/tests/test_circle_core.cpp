#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "birkhoff_lab/circle_core.hpp"
#include "birkhoff_lab/tower_partition.hpp"

using namespace birkhoff_lab;

namespace {

CirclePoint at(double x) { return CirclePoint::from_double(x); }
u128 len(double x) { return fraction_from_long_double(x); }

ArcSet arcset(std::initializer_list<std::pair<double, double>> arcs) {
    std::vector<Arc> v;
    for (auto [a, b] : arcs) v.push_back(Arc{at(a), (at(b) - at(a)).raw()});
    return ArcSet::from_arcs(v);
}

// Largest sampled ratio |f(x) - f(y)| / ||x - y||^xi.
double sampled_holder_ratio(const PiecewiseFn& f, double xi, const std::vector<std::pair<CirclePoint, CirclePoint>>& pairs) {
    double best = 0.0;
    for (auto [x, y] : pairs) {
        double d = fraction_to_double(circle_distance(x, y));
        if (d == 0.0) continue;
        best = std::max(best, std::abs(f(x) - f(y)) / std::pow(d, xi));
    }
    return best;
}

} // namespace

TEST(FixedPoint, HexRoundTripAndArithmetic) {
    CirclePoint a = at(0.75), b = at(0.5);
    EXPECT_EQ((a + b).to_double(), 0.25);
    EXPECT_EQ((b - a).to_double(), 0.75);
    EXPECT_EQ(CirclePoint::from_hex(a.hex()), a);
    EXPECT_EQ(a.hex().size(), 32u);
    EXPECT_EQ(at(0.25).times(4).raw(), 0u);
    EXPECT_EQ(circle_distance(at(0.1), at(0.9)), circle_distance(at(0.9), at(0.1)));
    EXPECT_NEAR(fraction_to_double(circle_distance(at(0.1), at(0.9))), 0.2, 1e-15);
}

TEST(Orbit, Examples) {
    auto quarter = RotationNumber::fixture(at(0.25));
    auto o = orbit(CirclePoint{}, quarter, 4);
    ASSERT_EQ(o.size(), 4u);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(o[k].to_double(), 0.25 * k);
    auto s = orbit(CirclePoint{}, quarter, 2, 2);
    EXPECT_EQ(s[1].to_double(), 0.5);
    auto g = orbit(CirclePoint{}, RotationNumber::golden(), 2);
    EXPECT_NEAR(g[1].to_double(), (std::sqrt(5.0) - 1.0) / 2.0, 1e-15);
}

TEST(ArcSetOps, Examples) {
    auto c = arcset({{0.0, 0.25}}).complement();
    EXPECT_EQ(c.measure_double(), 0.75);
    EXPECT_TRUE(c.contains(at(0.5)));
    EXPECT_FALSE(c.contains(at(0.1)));

    auto i = arcset({{0.0, 0.5}}).intersect(arcset({{0.25, 0.75}}));
    EXPECT_EQ(i, arcset({{0.25, 0.5}}));

    // [0.9, 1) u [0, 0.2) given as one wrapping arc, merged with [0.1, 0.3)
    std::vector<Arc> arcs{Arc{at(0.9), len(0.3)}, Arc{at(0.1), len(0.2)}};
    auto u = ArcSet::from_arcs(arcs);
    EXPECT_NEAR(u.measure_double(), 0.4, 1e-15);
    EXPECT_EQ(u.arc_count(), 1u);
}

TEST(ArcSetOps, AlgebraAgainstMembershipOracle) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Arc> a, b;
        for (int k = 0; k < 6; ++k) {
            a.push_back(Arc{at(U(gen)), len(0.2 * U(gen) + 1e-6)});
            b.push_back(Arc{at(U(gen)), len(0.2 * U(gen) + 1e-6)});
        }
        auto A = ArcSet::from_arcs(a), B = ArcSet::from_arcs(b);
        auto in = [](const std::vector<Arc>& v, CirclePoint x) {
            for (const auto& arc : v)
                if (arc.contains(x)) return true;
            return false;
        };
        auto I = A.intersect(B), Un = A.unite(B), D = A.subtract(B), C = A.complement();
        for (int s = 0; s < 200; ++s) {
            CirclePoint x = at(U(gen));
            bool ia = in(a, x), ib = in(b, x);
            EXPECT_EQ(A.contains(x), ia);
            EXPECT_EQ(I.contains(x), ia && ib);
            EXPECT_EQ(Un.contains(x), ia || ib);
            EXPECT_EQ(D.contains(x), ia && !ib);
            EXPECT_EQ(C.contains(x), !ia);
        }
        EXPECT_EQ(A.measure() + C.measure(), kOne);
        EXPECT_EQ(Un.measure() + I.measure(), A.measure() + B.measure());
        EXPECT_TRUE(Un.includes(A));
    }
}

TEST(Piecewise, CuspEvaluationAndMean) {
    PiecewiseFn f({Segment::cusp(CirclePoint{}, len(0.25), 1.0, 0.5, +1)}, Continuity::Allow);
    EXPECT_NEAR(f(at(0.04)), 0.2, 1e-15);
    EXPECT_EQ(f(at(0.5)), 0.0);
    // int_0^{1/4} t^{1/2} dt = (1/4)^{3/2} / (3/2)
    EXPECT_NEAR(f.mean(), std::pow(0.25, 1.5) / 1.5, 1e-15);
}

TEST(Piecewise, TentMeanAndZero) {
    const double h = 0.3, b = 0.2;
    PiecewiseFn tent({Segment::affine(at(0.1), len(b / 2), 0.0, h), Segment::affine(at(0.2), len(b / 2), h, 0.0)});
    EXPECT_NEAR(tent.mean(), h * b / 2, 1e-16);
    EXPECT_NEAR(tent.sup_norm(), h, 1e-16);

    PiecewiseFn zero;
    EXPECT_EQ(zero.mean(), 0.0);
    EXPECT_EQ(zero.sup_norm(), 0.0);
    EXPECT_EQ(zero.lip_seminorm(0.5), 0.0);
    EXPECT_EQ(zero(at(0.3)), 0.0);
}

TEST(Piecewise, DiscontinuityRejectedUnlessAllowed) {
    std::vector<Segment> s{Segment::constant(CirclePoint{}, len(0.5), 1.0), Segment::constant(at(0.5), len(0.5), -1.0)};
    EXPECT_THROW(PiecewiseFn{s}, Error);
    PiecewiseFn ok(s, Continuity::Allow);
    EXPECT_EQ(ok.mean(), 0.0);
}

TEST(Piecewise, UnsupportedExponent) {
    PiecewiseFn f({Segment::cusp(CirclePoint{}, len(0.25), 1.0, 0.3, +1)}, Continuity::Allow);
    try {
        f.lip_seminorm(0.5);
        FAIL() << "expected UnsupportedExponent";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnsupportedExponent);
    }
}

TEST(Piecewise, CuspTentHasUnitSeminorm) {
    const double xi = 0.25;
    const u128 d = len(0.1);
    const double scale = 1.0;
    PiecewiseFn f({Segment::cusp(at(0.3), d / 2, scale, xi, +1), Segment::cusp(at(0.3).advanced(d / 2), d - d / 2, scale, xi, -1)});
    const double lip = f.lip_seminorm(xi);
    EXPECT_NEAR(lip, 1.0, 1e-12);
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> U(0.28, 0.42);
    std::vector<std::pair<CirclePoint, CirclePoint>> pairs;
    for (int i = 0; i < 20000; ++i) pairs.push_back({at(U(gen)), at(U(gen))});
    pairs.push_back({at(0.3), at(0.3 + 1e-9)});
    const double sampled = sampled_holder_ratio(f, xi, pairs);
    EXPECT_LE(sampled, lip * (1 + 1e-9));
    EXPECT_GE(sampled, 0.99);
}

TEST(Piecewise, SeminormBoundsSampledRatios) {
    // Opposite-sign tents side by side: the certified bound must dominate
    // every sampled ratio.
    const double xi = 0.5;
    std::vector<Segment> segs;
    for (int j = 0; j < 8; ++j) {
        const double sign = j % 3 == 0 ? -1.0 : 1.0;
        CirclePoint a = CirclePoint{}.advanced(len(0.1) * static_cast<u128>(j));
        segs.push_back(Segment::cusp(a, len(0.04), sign * 0.5, xi, +1));
        segs.push_back(Segment::cusp(a.advanced(len(0.04)), len(0.04), sign * 0.5, xi, -1));
        segs.push_back(Segment::affine(a.advanced(len(0.08)), len(0.01), 0.0, sign * 0.05));
        segs.push_back(Segment::affine(a.advanced(len(0.08) + len(0.01)), len(0.01), sign * 0.05, 0.0));
    }
    PiecewiseFn f(segs);
    const double lip = f.lip_seminorm(xi);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<std::pair<CirclePoint, CirclePoint>> pairs;
    for (int i = 0; i < 50000; ++i) {
        double x = U(gen);
        pairs.push_back({at(x), at(U(gen))});
        pairs.push_back({at(x), at(x + 0.1 * U(gen) * U(gen))});
    }
    EXPECT_LE(sampled_holder_ratio(f, xi, pairs), lip * (1 + 1e-9));
    EXPECT_LE(lip, 2.0);
}

TEST(Gauge, PowerLawAndTable) {
    auto g = GrowthGauge::power_law(0.5);
    EXPECT_DOUBLE_EQ(g(100), 10.0);
    auto t = GrowthGauge::from_table({1.0, 1.5, 2.0, 2.2});
    EXPECT_EQ(t(3), 2.0);
    EXPECT_THROW(t(5), Error);
    EXPECT_THROW(GrowthGauge::power_law(1.0), Error);
    EXPECT_THROW(GrowthGauge::from_table({1.0, 0.5}), Error);
}

TEST(TowerPartition, GoldenLevelOneAndTwo) {
    auto golden = RotationNumber::golden();
    auto p1 = TowerPartition::build(golden, 1);
    EXPECT_EQ(p1.base(1).start, golden.value());  // odd level: [{alpha}, 1)
    EXPECT_EQ(p1.base(2).start.raw(), 0u);         // even level: [0, {2 alpha})
    EXPECT_EQ(p1.base(2).length, golden.value().times(2).raw());
    EXPECT_NEAR(p1.d_double(1), 0.38197, 1e-5);
    EXPECT_GE(p1.d_double(1), 0.25);
    EXPECT_LE(p1.d_double(1), 0.5);

    auto p2 = TowerPartition::build(golden, 2);
    EXPECT_EQ(p2.base(2).start.raw(), 0u);
    EXPECT_NEAR(p2.d_double(2), 0.23607, 1e-5);
    EXPECT_GE(p2.d_double(2), 1.0 / 6.0);
    EXPECT_LE(p2.d_double(2), 1.0 / 3.0);
}

TEST(TowerPartition, ExactTilingAndTranslates) {
    for (const auto& alpha : {RotationNumber::golden(), RotationNumber::sqrt2_minus_1()}) {
        auto q = denominators(alpha, 30);
        for (std::size_t n = 1; q[n + 1] <= 20000; ++n) {
            auto p = TowerPartition::build(alpha, n);
            auto sorted = p.sorted_arcs();
            ASSERT_EQ(sorted.size(), q[n] + q[n + 1]);
            u128 total = 0;
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                total += sorted[i].first.length;
                EXPECT_EQ(sorted[i].first.end(), sorted[(i + 1) % sorted.size()].first.start);
            }
            EXPECT_EQ(total, kOne);
            for (std::uint64_t j = 0; j < q[n + 1]; j += 7)
                EXPECT_EQ(p.arc(n, j).start, p.base(n).start + alpha.value().times(j));
        }
    }
}

TEST(TowerPartition, LocateAgreesWithLinearScan) {
    auto golden = RotationNumber::golden();
    auto p = TowerPartition::build(golden, 5);
    EXPECT_EQ(p.locate(p.base(5).start), (TowerPartition::Location{5, 0}));
    EXPECT_EQ(p.locate(p.base(5).start + golden.value()), (TowerPartition::Location{5, 1}));
    std::mt19937_64 gen(9);
    for (int i = 0; i < 1000; ++i) {
        CirclePoint x = CirclePoint::from_raw((static_cast<u128>(gen()) << 64 | gen()));
        std::optional<TowerPartition::Location> hit;
        for (std::size_t lvl : {std::size_t{5}, std::size_t{6}})
            for (std::uint64_t j = 0; j < p.family_size(lvl); ++j)
                if (p.arc(lvl, j).contains(x)) {
                    ASSERT_FALSE(hit.has_value());
                    hit = TowerPartition::Location{lvl, j};
                }
        ASSERT_TRUE(hit.has_value());
        EXPECT_EQ(p.locate(x), *hit);
    }
}

TEST(TowerPartition, BudgetExceeded) {
    try {
        TowerPartition::build(RotationNumber::golden(), 30, 1000);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BudgetExceeded);
    }
}
