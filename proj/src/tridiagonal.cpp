#include "doismol/tridiagonal.hpp"

#include "doismol/errors.hpp"

#include <cmath>

#include <fmt/core.h>

namespace doismol {

TridiagonalSolver::TridiagonalSolver(std::span<const double> lower,
                                     std::span<const double> diag,
                                     std::span<const double> upper)
    : lower_(lower.begin(), lower.end()), upper_prime_(diag.size()), inv_pivot_(diag.size())
{
    const std::size_t n = diag.size();
    if (n == 0 || lower.size() != n || upper.size() != n) {
        throw ValidationError("tridiagonal bands must be non-empty and equally sized");
    }
    double prev_upper = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sub = i == 0 ? 0.0 : lower[i];
        const double pivot = diag[i] - sub * prev_upper;
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw ValidationError(fmt::format("singular tridiagonal pivot at row {}", i));
        }
        inv_pivot_[i] = 1.0 / pivot;
        upper_prime_[i] = i + 1 < n ? upper[i] * inv_pivot_[i] : 0.0;
        prev_upper = upper_prime_[i];
    }
}

void TridiagonalSolver::solve(std::span<const double> rhs, std::span<double> x) const
{
    const std::size_t n = size();
    if (rhs.size() != n || x.size() != n) {
        throw ValidationError("tridiagonal solve: size mismatch");
    }
    // Forward sweep
    x[0] = rhs[0] * inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) {
        x[i] = (rhs[i] - lower_[i] * x[i - 1]) * inv_pivot_[i];
    }
    // Back substitution
    for (std::size_t i = n - 1; i > 0; --i) {
        x[i - 1] -= upper_prime_[i - 1] * x[i];
    }
}

}  // namespace doismol
