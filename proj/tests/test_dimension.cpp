#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "birkhoff_lab/dimension.hpp"

using namespace birkhoff_lab;

namespace {

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

struct SineCoboundary {
    CirclePoint alpha;
    double operator()(CirclePoint x) const { return sin_two_pi(x + alpha) - sin_two_pi(x); }
};

} // namespace

TEST(PreMeasure, WorkedValues) {
    EXPECT_EQ(pre_measure(std::vector<double>{}, 0.5, 0.5), 0.0);
    EXPECT_NEAR(pre_measure(std::vector<double>{0.04}, 0.5, 0.5), 0.2, 1e-15);
    EXPECT_NEAR(pre_measure(std::vector<double>{0.1, 0.01}, 0.5, 0.5), 0.41623, 1e-5);
    try {
        pre_measure(std::vector<double>{0.6}, 0.5, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MeshViolation);
    }
}

TEST(PreMeasure, MonotoneAndHomogeneous) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> len(1e-6, 1e-2);
    for (int trial = 0; trial < 50; ++trial) {
        const double s = 0.1 + 0.9 * std::uniform_real_distribution<double>()(gen);
        std::vector<double> lengths(1 + gen() % 40);
        for (auto& l : lengths) l = len(gen);
        const double base = pre_measure(lengths, s, 0.1);
        auto more = lengths;
        more.push_back(len(gen));
        EXPECT_GE(pre_measure(more, s, 0.1), base);
        const double lambda = 0.37;
        auto scaled = lengths;
        for (auto& l : scaled) l *= lambda;
        EXPECT_NEAR(pre_measure(scaled, s, 0.1), std::pow(lambda, s) * base, 1e-12 * base);
    }
}

TEST(CoverAudit, PlateauPassesAtBuiltLevel) {
    const auto& b = golden_plateau();
    auto audit = construction_cover_audit(b.spec, 0.5, 0.5, 0.5);
    EXPECT_TRUE(audit.pass);
    EXPECT_LT(audit.pre_measure, 0.5);
    double sum = 0.0;
    for (const auto& c : audit.classes) {
        EXPECT_LE(c.count, c.count_bound) << c.name;
        sum += c.pre_measure;
    }
    EXPECT_NEAR(sum, audit.pre_measure, 1e-12);
    EXPECT_FALSE(construction_cover_audit(b.spec, 0.5, 0.5, 0.0).pass);
}

TEST(CoverAudit, ClassesMustTileComplement) {
    const auto& b = golden_plateau();
    auto classes = plateau_cover_classes(b.spec);
    ASSERT_FALSE(classes.empty());
    ASSERT_FALSE(classes.front().arcs.empty());
    classes.front().arcs.pop_back();
    try {
        audit_cover_classes(classes, b.spec.good_set, 0.5, 0.5, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CoverMismatch);
    }
    auto inflated = plateau_cover_classes(b.spec);
    inflated.front().count_bound = 0;
    EXPECT_THROW(audit_cover_classes(inflated, b.spec.good_set, 0.5, 0.5, 0.5), Error);
}

TEST(CoverAudit, HolderClassesTileAndMatchBuilder) {
    HolderOptions opt;
    opt.require_cover = false;
    opt.arc_budget = 400'000;
    opt.n_min = 20;
    auto b = build_holder(RotationNumber::golden(), opt);
    auto audit = construction_cover_audit(b.spec, b.spec.s, b.spec.delta, b.spec.budget);
    EXPECT_NEAR(audit.pre_measure, b.spec.cover_bound, 1e-9 * b.spec.cover_bound);
    EXPECT_EQ(audit.pass, b.spec.cover_ok);
    EXPECT_GE(audit.classes.size(), 3u);
}

TEST(BoxCount, FullEmptyAndPoint) {
    const std::size_t grid = 1u << 16;
    std::vector<std::uint8_t> full(grid, 1);
    auto f = box_count(full);
    EXPECT_FALSE(f.undefined);
    EXPECT_NEAR(f.dimension, 1.0, 1e-12);
    EXPECT_NEAR(f.residual, 0.0, 1e-12);

    std::vector<std::uint8_t> empty(grid, 0);
    EXPECT_TRUE(box_count(empty).undefined);

    std::vector<std::uint8_t> point(grid, 0);
    point[12345] = 1;
    EXPECT_NEAR(box_count(point).dimension, 0.0, 1e-12);
    EXPECT_THROW(box_count(std::vector<std::uint8_t>(1000, 1)), Error);
}

TEST(BoxCount, DyadicCantorSetHasHalfDimension) {
    // cells whose base-4 digits are all 0 or 3: 2^{j/2} boxes at scale 2^-j
    const std::size_t grid = 1u << 16;
    std::vector<std::uint8_t> flags(grid, 0);
    for (std::size_t i = 0; i < grid; ++i) {
        bool in = true;
        for (std::size_t d = 0; d < 8 && in; ++d) {
            const std::size_t digit = (i >> (2 * d)) & 3;
            in = digit == 0 || digit == 3;
        }
        flags[i] = in;
    }
    auto fit = box_count(flags);
    EXPECT_NEAR(fit.dimension, 0.5, 0.05);
    EXPECT_EQ(fit.counts.front(), 8u);  // j = 6
    EXPECT_EQ(fit.counts.back(), 256u); // j = 16
}

TEST(SlowSet, CoboundaryIsEverywhereSlow) {
    auto golden = RotationNumber::golden();
    SineCoboundary f{golden.value()};
    auto sample = slow_set_sample(f, golden, GrowthGauge::power_law(0.25), 10.0, 1, 2000, 1u << 12);
    EXPECT_EQ(sample.slow_count, sample.grid);
    EXPECT_EQ(sample.slow_cells.measure(), kOne);
    EXPECT_NEAR(sample.fit.dimension, 1.0, 1e-12);
}

TEST(SlowSet, AntitoneInThreshold) {
    auto golden = RotationNumber::golden();
    auto f = [](CirclePoint x) { return sin_two_pi(x) + 0.3 * (x.to_double() < 0.5 ? 1.0 : -1.0); };
    auto low = slow_set_sample(f, golden, GrowthGauge::power_law(0.5), 0.2, 10, 500, 1u << 10);
    auto high = slow_set_sample(f, golden, GrowthGauge::power_law(0.5), 0.6, 10, 500, 1u << 10);
    for (std::size_t i = 0; i < low.grid; ++i)
        if (low.slow[i]) EXPECT_TRUE(high.slow[i]);
    EXPECT_LE(low.slow_count, high.slow_count);
    auto none = slow_set_sample(f, golden, GrowthGauge::power_law(0.5), -1.0, 10, 50, 1u << 10);
    EXPECT_EQ(none.slow_count, 0u);
    EXPECT_TRUE(none.fit.undefined);
}

TEST(SlowSet, PlateauGoodSetIsFast) {
    const auto& b = golden_plateau();
    auto golden = RotationNumber::golden();
    const auto gauge = GrowthGauge::power_law(0.5);
    const double m = static_cast<double>(b.spec.m);
    const double threshold = 0.99 * b.spec.epsilon * m / gauge(b.spec.m);
    auto sample = slow_set_sample(b.f, golden, gauge, threshold, b.spec.m, b.spec.m, 1u << 14);
    const u128 cell = kOne / sample.grid;
    std::uint64_t checked = 0;
    for (std::uint64_t i = 0; i < sample.grid; ++i) {
        const CirclePoint center = CirclePoint::from_raw(cell * i + cell / 2);
        if (b.spec.good_set.contains(center)) {
            EXPECT_FALSE(sample.slow[i]) << i;
            ++checked;
        }
    }
    EXPECT_GT(checked, sample.grid / 2);
    // the slow proxy lies inside the complement cover up to whole cells
    ArcSet slow_centers;
    std::vector<Arc> centers;
    for (std::uint64_t i = 0; i < sample.grid; ++i)
        if (sample.slow[i]) centers.push_back(Arc{CirclePoint::from_raw(cell * i + cell / 2), 1});
    slow_centers = ArcSet::from_arcs(centers);
    EXPECT_TRUE(slow_centers.intersect(b.spec.good_set).empty());
}

TEST(SlowSet, Budget) {
    auto golden = RotationNumber::golden();
    try {
        slow_set_sample([](CirclePoint) { return 0.0; }, golden, GrowthGauge::power_law(0.5), 1.0, 1, 1'000'000,
                        1u << 24);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BudgetExceeded);
    }
}
