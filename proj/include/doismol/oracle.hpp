#pragma once

#include "doismol/domain_grid.hpp"
#include "doismol/solvers.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace doismol {

// Reference solutions for m = 3. With v = r u the radial Smoluchowski problem
// becomes v_t = kappa v_rr on (a, R), v(a) = 0, R v'(R) = v(R), whose modes
// are sin(beta (r - a)) with tan(beta (R - a)) = beta R.

struct EigenMode {
    double beta = 0.0;
    /// Expansion coefficient of r g(r) on sin(beta (r - a)).
    double coefficient = 0.0;
    /// int_a^R sin^2(beta (r - a)) dr.
    double normalization = 0.0;
};

/// First `count` roots of tan(beta (R - a)) = beta R, increasing. Root k
/// (1-based) satisfies beta (R - a) in ((k-1) pi, (k-1/2) pi).
std::vector<double> eigen_wavenumbers(const RadialDomain& domain, int count);

/// |(R-a) sin x - x R cos x| / ((R-a) + x R) at x = beta (R - a); zero at a root.
double eigen_residual(const RadialDomain& domain, double beta);

/// Modes with coefficients of g, projected with composite Gauss-Legendre
/// quadrature on [a, R].
std::vector<EigenMode> eigen_modes(const RadialFunction& g, const RadialDomain& domain,
                                   int count);

/// Separation-of-variables solution on the annulus. Without `modes` the
/// series is truncated once ten consecutive coefficients fall below 1e-10 of
/// the largest one.
Field series_solution(const RadialFunction& g, double kappa, const GridPtr& grid,
                      std::optional<int> modes = std::nullopt);

/// Number of modes series_solution picks when none is given.
int series_truncation(const RadialFunction& g, double kappa, const SpaceTimeGrid& grid);

/// u*(t, r) together with the derivatives the source needs.
struct ManufacturedSolution {
    std::function<double(double, double)> value;
    std::function<double(double, double)> time_derivative;
    std::function<double(double, double)> radial_derivative;
    std::function<double(double, double)> radial_second_derivative;
};

struct ManufacturedData {
    Field forcing;
    Field exact;
    Field boundary;
};

/// f = u*_t - kappa Lap u* + lambda 1 u* on the region (FullBall or Annulus;
/// the absorption term only on FullBall). On the interface node the
/// indicator is replaced by its cell average, the inner volume fraction, so
/// the sampled source matches the solver's half-cell absorption.
ManufacturedData mms_source(const ManufacturedSolution& solution, const ProblemSpec& spec,
                            const GridPtr& grid, Region region);

}  // namespace doismol
