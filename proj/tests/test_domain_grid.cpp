#include "doismol/domain_grid.hpp"
#include "doismol/errors.hpp"

#include "helpers.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include <gtest/gtest.h>

using namespace doismol;
using doismol::testing::small_grid;

TEST(RadialDomain, SphereAreaThreeDimensions)
{
    const auto d = build_domain(3, 1.0, 2.0);
    EXPECT_NEAR(d.sphere_area(), 4.0 * std::numbers::pi, 1e-14);
}

TEST(RadialDomain, SphereAreaFiveDimensions)
{
    const auto d = build_domain(5, 0.5, 1.5);
    EXPECT_NEAR(d.sphere_area(), 8.0 * std::numbers::pi * std::numbers::pi / 3.0, 1e-12);
}

TEST(RadialDomain, SphereAreaLowDimensions)
{
    EXPECT_NEAR(build_domain(1, 1.0, 2.0).sphere_area(), 2.0, 1e-14);
    EXPECT_NEAR(build_domain(2, 1.0, 2.0).sphere_area(), 2.0 * std::numbers::pi, 1e-14);
}

TEST(RadialDomain, RejectsBadGeometry)
{
    EXPECT_THROW(build_domain(3, 2.0, 1.0), ValidationError);
    EXPECT_THROW(build_domain(3, 1.0, 1.0), ValidationError);
    EXPECT_THROW(build_domain(3, 0.0, 1.0), ValidationError);
    EXPECT_THROW(build_domain(3, -1.0, 1.0), ValidationError);
    EXPECT_THROW(build_domain(0, 1.0, 2.0), ValidationError);
}

TEST(SpaceTimeGrid, InterfaceIsANode)
{
    const auto g = small_grid(32, 16);
    EXPECT_EQ(g->interface_index(), 16);
    EXPECT_DOUBLE_EQ(g->r(g->interface_index()), 1.0);
    EXPECT_DOUBLE_EQ(g->dt(), 0.5 / 16);
}

TEST(SpaceTimeGrid, RejectsMisalignedAndCoarseGrids)
{
    const RadialDomain d(3, 1.0, 2.0);
    EXPECT_THROW(SpaceTimeGrid(d, 0.5, 10, 33), ValidationError);
    EXPECT_THROW(SpaceTimeGrid(d, 0.5, 10, 2), ValidationError);
    EXPECT_THROW(SpaceTimeGrid(d, 0.0, 10, 32), ValidationError);
    EXPECT_THROW(SpaceTimeGrid(d, 0.5, 0, 32), ValidationError);
    const RadialDomain tight(3, 0.25, 2.0);
    EXPECT_THROW(SpaceTimeGrid(tight, 0.5, 10, 8), ValidationError);
}

TEST(SpaceTimeGrid, CellVolumesSumToBall)
{
    const auto g = small_grid(40, 4);
    const auto& d = g->domain();
    const auto cells = g->cell_volumes();
    const double total = std::accumulate(cells.begin(), cells.end(), 0.0);
    EXPECT_NEAR(total, d.ball_volume(2.0), 1e-12 * total);
    const auto inner = g->inner_volumes();
    const double inside = std::accumulate(inner.begin(), inner.end(), 0.0);
    EXPECT_NEAR(inside, d.ball_volume(1.0), 1e-12 * inside);
}

TEST(SpaceTimeGrid, TrapezoidWeightsSumToHorizon)
{
    const auto g = small_grid(8, 7);
    double sum = 0.0;
    for (int n = 0; n < g->time_levels(); ++n) {
        sum += g->time_weight(n);
    }
    EXPECT_NEAR(sum, 0.5, 1e-15);
}

TEST(SpaceTimeGrid, RefinementKeepsAlignment)
{
    const auto g = small_grid(8, 4);
    for (int f : {2, 3, 5}) {
        const auto fine = g->refined(f, f);
        EXPECT_EQ(fine.interface_index(), f * g->interface_index());
        EXPECT_DOUBLE_EQ(fine.r(fine.interface_index()), 1.0);
    }
}

TEST(Field, RejectsWrongShapeAndNonFinite)
{
    const auto g = small_grid(8, 2);
    EXPECT_THROW(Field(g, Region::FullBall, std::vector<double>(5, 0.0)), ValidationError);
    std::vector<double> bad(3 * 9, 0.0);
    bad[4] = std::nan("");
    EXPECT_THROW(Field(g, Region::FullBall, bad), ValidationError);
}

TEST(Field, RegionWidths)
{
    const auto g = small_grid(8, 2);
    EXPECT_EQ(Field::zeros(g, Region::FullBall).width(), 9);
    EXPECT_EQ(Field::zeros(g, Region::Annulus).width(), 5);
    EXPECT_EQ(Field::zeros(g, Region::Annulus).first_node(), 4);
    EXPECT_EQ(Field::zeros(g, Region::InnerBall).width(), 5);
    EXPECT_EQ(Field::zeros(g, Region::LateralBoundary).width(), 1);
}

TEST(ExtendByZero, OnesOnAnnulus)
{
    const auto g = small_grid(8, 2);
    const auto one = Field::sample(g, Region::Annulus, [](double, double) { return 1.0; });
    const auto e = extend_by_zero(one);
    ASSERT_EQ(e.region(), Region::FullBall);
    for (int n = 0; n < e.levels(); ++n) {
        for (int j = 0; j <= 8; ++j) {
            EXPECT_EQ(e.at(n, j), j < 4 ? 0.0 : 1.0);
        }
    }
}

TEST(ExtendByZero, RestrictOuterIsLeftInverse)
{
    std::mt19937_64 rng(1);
    const auto g = small_grid(16, 3);
    const auto f = doismol::testing::random_field(g, Region::Annulus, rng);
    const auto back = restrict_outer(extend_by_zero(f));
    ASSERT_EQ(back.values().size(), f.values().size());
    EXPECT_TRUE(std::equal(f.values().begin(), f.values().end(), back.values().begin()));
}

TEST(ExtendByZero, NotRightInverseWhenInnerPartNonzero)
{
    const auto g = small_grid(16, 3);
    const auto f = Field::sample(g, Region::FullBall, [](double, double r) { return 2.0 - r; });
    const auto round = extend_by_zero(restrict_outer(f));
    EXPECT_GT((round - f).max_abs(), 0.5);

    const auto outer_only = Field::sample(g, Region::FullBall,
                                          [](double, double r) { return r >= 1.0 ? r : 0.0; });
    EXPECT_EQ((extend_by_zero(restrict_outer(outer_only)) - outer_only).max_abs(), 0.0);
}

TEST(ExtendByZero, RegionMismatch)
{
    const auto g = small_grid(8, 2);
    EXPECT_THROW(extend_by_zero(Field::zeros(g, Region::FullBall)), ValidationError);
    EXPECT_THROW(restrict_outer(Field::zeros(g, Region::Annulus)), ValidationError);
    EXPECT_THROW(restrict_inner(Field::zeros(g, Region::InnerBall)), ValidationError);
}

TEST(Restrict, ConstantAndSharedInterface)
{
    const auto g = small_grid(16, 2);
    const auto f = Field::sample(g, Region::FullBall, [](double t, double r) { return t + r * r; });
    const auto in = restrict_inner(f);
    const auto out = restrict_outer(f);
    const int j0 = g->interface_index();
    for (int n = 0; n < f.levels(); ++n) {
        EXPECT_EQ(in.at(n, j0), out.at(n, j0));
        for (int j = 0; j <= 16; ++j) {
            EXPECT_EQ(j <= j0 ? in.at(n, j) : out.at(n, j), f.at(n, j));
        }
    }
    const auto c = Field::sample(g, Region::FullBall, [](double, double) { return 3.5; });
    EXPECT_EQ(restrict_inner(c).max_abs(), 3.5);
    EXPECT_EQ(restrict_outer(c).max_abs(), 3.5);
}

TEST(LateralTrace, Examples)
{
    const auto g = small_grid(16, 4);
    const auto r = Field::sample(g, Region::FullBall, [](double, double x) { return x; });
    const auto tr = lateral_trace(r);
    for (int n = 0; n < tr.levels(); ++n) {
        EXPECT_EQ(tr.at(n, g->interface_index()), 1.0);
    }
    const auto vanishing = Field::sample(g, Region::Annulus,
                                         [](double t, double x) { return t * (x - 1.0); });
    EXPECT_EQ(lateral_trace(vanishing).max_abs(), 0.0);

    std::mt19937_64 rng(7);
    const auto a = doismol::testing::random_field(g, Region::Annulus, rng);
    const auto ta = lateral_trace(a);
    const auto te = lateral_trace(extend_by_zero(a));
    EXPECT_TRUE(std::equal(ta.values().begin(), ta.values().end(), te.values().begin()));
}

TEST(TimeReversed, Involution)
{
    std::mt19937_64 rng(3);
    const auto g = small_grid(8, 5);
    const auto f = doismol::testing::random_field(g, Region::Annulus, rng);
    const auto twice = time_reversed(time_reversed(f));
    EXPECT_EQ((twice - f).max_abs(), 0.0);
    EXPECT_EQ(time_reversed(f).at(0, 6), f.at(5, 6));
}
