#include "doismol/errors.hpp"
#include "doismol/norms.hpp"
#include "doismol/oracle.hpp"

#include "helpers.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

using namespace doismol;
using doismol::testing::bump_spec;
using doismol::testing::small_grid;
using doismol::testing::unit_domain;

TEST(EigenWavenumbers, RootsSatisfyRobinCondition)
{
    const auto d = unit_domain();
    const auto betas = eigen_wavenumbers(d, 50);
    ASSERT_EQ(betas.size(), 50u);
    for (std::size_t k = 0; k < betas.size(); ++k) {
        EXPECT_LE(eigen_residual(d, betas[k]), 1e-12);
        EXPECT_GT(betas[k] * 1.0, k * std::numbers::pi);
        EXPECT_LT(betas[k] * 1.0, (k + 0.5) * std::numbers::pi);
        if (k > 0) {
            EXPECT_GT(betas[k], betas[k - 1]);
        }
    }
}

TEST(EigenWavenumbers, FirstRootForUnitAnnulus)
{
    // tan x = 2 x on (0, pi/2).
    const double x = eigen_wavenumbers(unit_domain(), 1).front();
    EXPECT_NEAR(std::tan(x), 2.0 * x, 1e-9);
    EXPECT_NEAR(x, 1.16556118520721, 1e-12);
}

TEST(EigenWavenumbers, EdgeCases)
{
    EXPECT_TRUE(eigen_wavenumbers(unit_domain(), 0).empty());
    EXPECT_THROW(eigen_wavenumbers(RadialDomain(2, 1.0, 2.0), 3), ValidationError);
    EXPECT_THROW(eigen_wavenumbers(unit_domain(), -1), ValidationError);
}

TEST(EigenModes, Orthogonality)
{
    const auto d = unit_domain();
    const auto betas = eigen_wavenumbers(d, 6);
    for (std::size_t j = 0; j < betas.size(); ++j) {
        const double bj = betas[j];
        const auto modes = eigen_modes([bj](double r) { return std::sin(bj * (r - 1.0)) / r; }, d, 6);
        for (std::size_t k = 0; k < modes.size(); ++k) {
            EXPECT_NEAR(modes[k].coefficient, j == k ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(SeriesSolution, EigenmodeIsSingleTerm)
{
    const auto d = unit_domain();
    const auto grid = small_grid(32, 16);
    const auto g = eigenmode_profile(d, 2);
    const double beta = eigen_wavenumbers(d, 2).back();
    const auto series = series_solution(g, 1.0, grid);
    const auto exact = Field::sample(grid, Region::Annulus,
                                     [&](double t, double r) { return std::exp(-beta * beta * t) * g(r); });
    EXPECT_LT((series - exact).max_abs(), 1e-12);
}

TEST(SeriesSolution, ReproducesSmoothDatumAtTimeZero)
{
    const auto grid = small_grid(64, 16);
    const auto g = bump_spec().initial;
    const auto series = series_solution(g, 1.0, grid);
    double worst = 0.0;
    for (int j = grid->interface_index(); j < grid->nodes(); ++j) {
        worst = std::max(worst, std::abs(series.at(0, j) - g(grid->r(j))));
    }
    EXPECT_LT(worst, 1e-6);
}

TEST(SeriesSolution, EnergyIdentityClosesAsModesGrow)
{
    // 1/2 ||u(T)||^2 + kappa int ||grad u||^2 = 1/2 ||g||^2 for the exact
    // series, term by term: sum c_k^2 N_k (1 - e^{-2 beta^2 T}) / 2 = 1/2 ||g||^2 - 1/2 ||u(T)||^2.
    const auto d = unit_domain();
    const auto g = bump_spec().initial;
    const double T = 0.5;
    double norm_g = 0.0;
    for (const auto& m : eigen_modes(g, d, 400)) {
        norm_g += m.coefficient * m.coefficient * m.normalization;
    }
    double previous = INFINITY;
    for (int count : {10, 40, 160}) {
        double mass_T = 0.0, dissipated = 0.0;
        for (const auto& m : eigen_modes(g, d, count)) {
            const double c2n = m.coefficient * m.coefficient * m.normalization;
            mass_T += c2n * std::exp(-2.0 * m.beta * m.beta * T);
            dissipated += c2n * (1.0 - std::exp(-2.0 * m.beta * m.beta * T));
        }
        const double gap = std::abs(mass_T + dissipated - norm_g) / norm_g;
        EXPECT_LE(gap, previous);
        previous = gap;
    }
    EXPECT_LT(previous, 1e-10);
}

TEST(SeriesSolution, SolverConvergesSecondOrderInSpace)
{
    const auto spec = bump_spec();
    double previous = 0.0;
    for (int nr : {64, 128, 256}) {
        const auto grid = small_grid(nr, 8192);
        const auto err = (solve_smoluchowski(spec, grid) - series_solution(spec.initial, 1.0, grid)).max_abs();
        if (previous > 0.0) {
            EXPECT_NEAR(std::log2(previous / err), 2.0, 0.2);
        }
        previous = err;
    }
}

TEST(Mms, ZeroSolutionGivesZeroSource)
{
    const auto grid = small_grid();
    auto zero = [](double, double) { return 0.0; };
    const auto data = mms_source({zero, zero, zero, zero}, bump_spec(10.0), grid, Region::FullBall);
    EXPECT_EQ(data.forcing.max_abs(), 0.0);
    EXPECT_EQ(data.exact.max_abs(), 0.0);
    EXPECT_EQ(data.boundary.max_abs(), 0.0);
}

TEST(Mms, HarmonicProfileGivesAlgebraicSource)
{
    // Constant in r: harmonic and flux free, so f = -u + lambda 1 u.
    const double lambda = 7.0;
    const auto grid = small_grid(16, 8);
    ManufacturedSolution u{
        [](double t, double) { return std::exp(-t); },
        [](double t, double) { return -std::exp(-t); },
        [](double, double) { return 0.0; },
        [](double, double) { return 0.0; },
    };
    const auto data = mms_source(u, bump_spec(lambda), grid, Region::FullBall);
    for (int n = 0; n < grid->time_levels(); ++n) {
        for (int j = 0; j < grid->nodes(); ++j) {
            const double inside = grid->inner_volume(j) / grid->cell_volume(j);
            const double value = std::exp(-grid->t(n));
            EXPECT_NEAR(data.forcing.at(n, j), -value + lambda * inside * value, 1e-14);
        }
    }
    EXPECT_THROW(mms_source(u, bump_spec(), grid, Region::InnerBall), ValidationError);
}

TEST(Mms, DoiSolverMatchesManufacturedSolution)
{
    // Smooth in r with zero slope at 0 and R; the absorption term sits in f.
    ManufacturedSolution u{
        [](double t, double r) { return std::cos(t) * (1.0 + r * r * (3.0 - r)); },
        [](double t, double r) { return -std::sin(t) * (1.0 + r * r * (3.0 - r)); },
        [](double t, double r) { return std::cos(t) * (6.0 * r - 3.0 * r * r); },
        [](double t, double r) { return std::cos(t) * (6.0 - 6.0 * r); },
    };
    double previous = 0.0;
    for (int nr : {32, 64, 128}) {
        const auto grid = small_grid(nr, 4 * nr);
        auto spec = bump_spec(20.0);
        const auto data = mms_source(u, spec, grid, Region::FullBall);
        spec.initial = [&](double r) { return u.value(0.0, r); };
        spec.forcing = data.forcing;
        const double err = (solve_forced(spec, grid, false) - data.exact).max_abs();
        if (previous > 0.0) {
            EXPECT_GT(std::log2(previous / err), 1.7);
        }
        previous = err;
    }
}
