#include "doismol/errors.hpp"
#include "doismol/tridiagonal.hpp"

#include <random>
#include <vector>

#include <gtest/gtest.h>

using namespace doismol;

TEST(Tridiagonal, SolvesRandomDiagonallyDominantSystem)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 50;
    std::vector<double> lo(n), di(n), up(n), x(n), rhs(n), out(n);
    for (int i = 0; i < n; ++i) {
        lo[i] = i > 0 ? u(rng) : 0.0;
        up[i] = i + 1 < n ? u(rng) : 0.0;
        di[i] = 3.0 + u(rng);
        x[i] = u(rng);
    }
    for (int i = 0; i < n; ++i) {
        rhs[i] = di[i] * x[i] + (i > 0 ? lo[i] * x[i - 1] : 0.0) + (i + 1 < n ? up[i] * x[i + 1] : 0.0);
    }
    TridiagonalSolver solver(lo, di, up);
    solver.solve(rhs, out);
    for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(out[i], x[i], 1e-13);
    }
}

TEST(Tridiagonal, RejectsZeroPivotAndSizeMismatch)
{
    std::vector<double> lo{0.0, 1.0}, di{0.0, 1.0}, up{1.0, 0.0};
    EXPECT_THROW(TridiagonalSolver(lo, di, up), ValidationError);
    std::vector<double> short_diag{1.0};
    EXPECT_THROW(TridiagonalSolver(lo, short_diag, up), ValidationError);
}
