#pragma once

#include <span>
#include <vector>

namespace doismol {

/// LU factorization of a tridiagonal matrix (Thomas algorithm, no pivoting),
/// kept so one matrix can be applied to many right-hand sides.
///
/// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]; lower[0] and
/// upper[n-1] are ignored.
class TridiagonalSolver {
public:
    TridiagonalSolver(std::span<const double> lower, std::span<const double> diag,
                      std::span<const double> upper);

    std::size_t size() const noexcept { return inv_pivot_.size(); }

    void solve(std::span<const double> rhs, std::span<double> x) const;

private:
    std::vector<double> lower_;
    std::vector<double> upper_prime_;
    std::vector<double> inv_pivot_;
};

}  // namespace doismol
