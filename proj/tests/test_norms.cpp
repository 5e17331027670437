#include "doismol/errors.hpp"
#include "doismol/norms.hpp"

#include "helpers.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

using namespace doismol;
using doismol::testing::bump_spec;
using doismol::testing::random_field;
using doismol::testing::small_grid;

namespace {

Field constant(const GridPtr& grid, Region region, double c)
{
    return Field::sample(grid, region, [c](double, double) { return c; });
}

}  // namespace

TEST(L2, ConstantOnWholeBall)
{
    const auto grid = small_grid(32, 10);
    const double expected = std::sqrt(0.5 * 4.0 / 3.0 * std::numbers::pi * 8.0);
    EXPECT_NEAR(l2(constant(grid, Region::FullBall, 1.0), NormRegion::Q), expected, 1e-12);
    EXPECT_NEAR(expected, 4.0933, 1e-4);
}

TEST(L2, ConstantOnLateralBoundary)
{
    const auto grid = small_grid(32, 10);
    const auto one = constant(grid, Region::LateralBoundary, 1.0);
    EXPECT_NEAR(l2(one, NormRegion::Sigma0), std::sqrt(2.0 * std::numbers::pi), 1e-12);
}

TEST(L2, ZeroField)
{
    const auto grid = small_grid();
    EXPECT_EQ(l2(Field::zeros(grid, Region::FullBall), NormRegion::Q), 0.0);
}

TEST(L2, RegionMustBeCovered)
{
    const auto grid = small_grid();
    EXPECT_THROW(l2(Field::zeros(grid, Region::Annulus), NormRegion::Q0), ValidationError);
    EXPECT_THROW(l2(Field::zeros(grid, Region::InnerBall), NormRegion::Q), ValidationError);
}

TEST(L2, ExtensionByZeroKeepsNorm)
{
    // Exact only for g(a) = 0: the interface node also weighs its inner half cell.
    const auto grid = small_grid(16, 6);
    const auto g = Field::sample(grid, Region::Annulus,
                                 [](double t, double r) { return (1.0 + t) * (r - 1.0) * (3.0 - r); });
    EXPECT_NEAR(l2(extend_by_zero(g), NormRegion::Q), l2(g, NormRegion::Q1), 1e-13);
}

TEST(L2, RegionDecompositionIsExact)
{
    std::mt19937_64 rng(6);
    const auto grid = small_grid(16, 6);
    for (int k = 0; k < 20; ++k) {
        const auto f = random_field(grid, Region::FullBall, rng);
        const double whole = std::pow(l2(f, NormRegion::Q), 2);
        const double parts = std::pow(l2(restrict_inner(f), NormRegion::Q0), 2)
                             + std::pow(l2(restrict_outer(f), NormRegion::Q1), 2);
        EXPECT_NEAR(whole, parts, 1e-12 * whole);
    }
}

TEST(GradL2, ConstantHasNoGradient)
{
    const auto grid = small_grid();
    EXPECT_EQ(grad_l2(constant(grid, Region::FullBall, 4.0), NormRegion::Q), 0.0);
}

TEST(GradL2, UnitSlopeInOneDimension)
{
    // omega_1 = 2 counts both endpoints of the shell {|x| = r}.
    const auto grid = make_grid(RadialDomain(1, 1.0, 2.0), 0.5, 4, 16);
    const auto u = Field::sample(grid, Region::Annulus, [](double, double r) { return r; });
    EXPECT_NEAR(grad_l2(u, NormRegion::Q1), std::sqrt(2.0 * 0.5 * 1.0), 1e-13);
}

TEST(GradL2, PoincareConstantIsStable)
{
    // Fit C on one field with u(a) = 0, then check others against it.
    const auto grid = small_grid(64, 4);
    auto ratio = [&](double k) {
        const auto u = Field::sample(grid, Region::Annulus,
                                     [k](double, double r) { return std::sin(k * (r - 1.0)); });
        return l2(u, NormRegion::Q1) / grad_l2(u, NormRegion::Q1);
    };
    const double c = ratio(std::numbers::pi / 2.0);
    for (double k : {2.0, 3.0, 5.0, 9.0}) {
        EXPECT_LE(ratio(k), c * 1.001);
    }
}

TEST(SupTL2, Examples)
{
    const auto grid = small_grid(32, 16);
    EXPECT_EQ(sup_t_l2(Field::zeros(grid, Region::Annulus), NormRegion::Q1), 0.0);
    const auto c = constant(grid, Region::Annulus, 2.0);
    EXPECT_DOUBLE_EQ(sup_t_l2(c, NormRegion::Q1), slice_l2(c, 3, NormRegion::Q1));

    const auto rho = solve_smoluchowski(bump_spec(), grid);
    EXPECT_DOUBLE_EQ(sup_t_l2(rho, NormRegion::Q1), slice_l2(rho, 0, NormRegion::Q1));
}

TEST(Slobodeckii, TimeConstantFieldVanishes)
{
    const auto grid = small_grid(16, 16);
    EXPECT_EQ(slobodeckii_time(constant(grid, Region::FullBall, 1.0), 0.3, NormRegion::Q), 0.0);
}

TEST(Slobodeckii, SeparableFieldFactorises)
{
    const auto grid = small_grid(16, 32);
    const auto phi = [](double r) { return 1.0 + r * r; };
    const auto u = Field::sample(grid, Region::FullBall, [&](double t, double r) { return t * phi(r); });
    const auto t_only = Field::sample(grid, Region::LateralBoundary, [](double t, double) { return t; });
    const auto shape = Field::sample(grid, Region::FullBall, [&](double, double r) { return phi(r); });
    const double mu = 0.35;
    const double t_seminorm = slobodeckii_time(t_only, mu, NormRegion::Sigma0)
                              / std::sqrt(grid->domain().shell_area(1.0));
    const double phi_norm = slice_l2(shape, 0, NormRegion::Q);
    EXPECT_NEAR(slobodeckii_time(u, mu, NormRegion::Q), t_seminorm * phi_norm, 1e-12);
}

TEST(Slobodeckii, ApproachesClosedFormForLinearTime)
{
    // [t]^2 over (0,T) is 2 T^{3-2mu} / ((2-2mu)(3-2mu)).
    const double T = 0.5;
    const double mu = 0.25;
    const double exact = std::sqrt(2.0 * std::pow(T, 3.0 - 2.0 * mu) / ((2.0 - 2.0 * mu) * (3.0 - 2.0 * mu)));
    double previous_gap = INFINITY;
    for (int nt : {64, 256, 1024}) {
        const auto grid = make_grid(RadialDomain(1, 1.0, 2.0), T, nt, 4);
        const auto u = Field::sample(grid, Region::LateralBoundary, [](double t, double) { return t; });
        const double area = grid->domain().shell_area(1.0);
        const double value = slobodeckii_time(u, mu, NormRegion::Sigma0) / std::sqrt(area);
        const double gap = std::abs(value - exact) / exact;
        EXPECT_LT(gap, previous_gap);
        previous_gap = gap;
    }
    EXPECT_LT(previous_gap, 0.02);
}

TEST(Slobodeckii, StableUnderTimeRefinementOnSolvedField)
{
    const auto spec = bump_spec(1e3);
    const auto coarse = solve_doi(spec, small_grid(64, 256));
    const auto fine = solve_doi(spec, small_grid(64, 512));
    const double a = slobodeckii_time(coarse, 0.25, NormRegion::Q);
    const double b = slobodeckii_time(fine, 0.25, NormRegion::Q);
    EXPECT_LT(std::abs(a - b) / b, 0.02);
}

TEST(Slobodeckii, RejectsEndpointOrders)
{
    const auto grid = small_grid();
    const auto f = Field::zeros(grid, Region::FullBall);
    for (double mu : {0.0, 1.0, -0.1, 1.5}) {
        EXPECT_THROW(slobodeckii_time(f, mu, NormRegion::Q), ValidationError);
    }
}

TEST(Interpolation, Examples)
{
    EXPECT_EQ(interpolation_bound(0.0, 3.0, 0.4), 0.0);
    EXPECT_EQ(interpolation_bound(2.5, 2.5, 0.7), 2.5);
    for (double lambda : {1e2, 1e4}) {
        EXPECT_NEAR(interpolation_bound(std::pow(lambda, -0.5), 1.0, 0.6),
                    std::pow(lambda, -(1.0 - 0.6) / 2.0), 1e-14);
    }
    EXPECT_THROW(interpolation_bound(-1.0, 1.0, 0.5), ValidationError);
    EXPECT_THROW(interpolation_bound(1.0, 1.0, 1.5), ValidationError);
}

TEST(Hrs, ZeroAndConstantFields)
{
    const auto grid = small_grid(16, 16);
    EXPECT_EQ(hrs_surrogate(Field::zeros(grid, Region::FullBall), 0.6, 0.6, NormRegion::Q), 0.0);
    const auto c = constant(grid, Region::FullBall, 3.0);
    EXPECT_NEAR(hrs_surrogate(c, 0.6, 0.6, NormRegion::Q), l2(c, NormRegion::Q), 1e-12);
    EXPECT_THROW(hrs_surrogate(c, 0.6, 0.6, NormRegion::Sigma0), ValidationError);
    EXPECT_THROW(hrs_surrogate(c, 1.0, 0.6, NormRegion::Q), ValidationError);
}

TEST(NormProperties, HomogeneityAndTriangleOnRandomPairs)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> scale(-3.0, 3.0);
    const auto grid = small_grid(16, 12);
    const std::vector<NormSpec> norms = {
        {NormRegion::Q, NormKind::L2},         {NormRegion::Q0, NormKind::L2},
        {NormRegion::Q1, NormKind::GradL2},    {NormRegion::Q, NormKind::SupTL2},
        {NormRegion::Q1, NormKind::SloboTime, 0.3},
    };
    const NormSpec hrs{NormRegion::Q, NormKind::Hrs, 0.4, 0.6};
    for (int k = 0; k < 100; ++k) {
        const auto u = random_field(grid, Region::FullBall, rng);
        const auto v = random_field(grid, Region::FullBall, rng);
        const double c = scale(rng);
        for (const auto& spec : norms) {
            const double nu = evaluate(u, spec);
            EXPECT_NEAR(evaluate(c * u, spec), std::abs(c) * nu, 1e-12 * (1.0 + nu));
            EXPECT_LE(evaluate(u + v, spec), nu + evaluate(v, spec) + 1e-12);
        }
        const double h = evaluate(u, hrs);
        EXPECT_NEAR(evaluate(c * u, hrs), std::abs(c) * h, 1e-12 * (1.0 + h));
    }
}

TEST(NormSpec, TimeSliceOnlyForSliceKinds)
{
    const auto grid = small_grid(16, 4);
    const auto f = constant(grid, Region::FullBall, 1.0);
    NormSpec slice{NormRegion::Q, NormKind::L2};
    slice.time_level = 2;
    EXPECT_NEAR(evaluate(f, slice), std::sqrt(grid->domain().ball_volume(2.0)), 1e-12);
    slice.time_level = 9;
    EXPECT_THROW(evaluate(f, slice), ValidationError);
    NormSpec bad{NormRegion::Q, NormKind::SupTL2};
    bad.time_level = 1;
    EXPECT_THROW(validate(bad), ValidationError);
}
