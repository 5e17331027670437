#pragma once

#include "doismol/domain_grid.hpp"

#include <functional>
#include <optional>
#include <span>

namespace doismol {

enum class Scheme { BackwardEuler, CrankNicolson };

/// Replace the first Crank-Nicolson step by two backward-Euler half steps.
/// Auto enables it when the initial datum does not match the interface value
/// (E_0 g has a kink, or Dirichlet data jumps at t = 0).
enum class StartupSmoothing { Auto, Off, On };

using RadialFunction = std::function<double(double)>;

struct ProblemSpec {
    explicit ProblemSpec(RadialDomain d) : domain(d) {}

    RadialDomain domain;
    double kappa = 1.0;
    /// Doi coupling strength; ignored by the Smoluchowski and annulus solvers.
    double lambda = 0.0;
    /// Initial datum as a function of r. The Doi and Smoluchowski solvers read
    /// it on [a, R] only; the full-ball forced solver reads it on [0, R].
    RadialFunction initial;
    Scheme scheme = Scheme::CrankNicolson;
    StartupSmoothing startup = StartupSmoothing::Auto;
    /// Source term f of the forced problem (FullBall or Annulus field).
    std::optional<Field> forcing;
    /// Dirichlet datum h on r = a for the annulus forced problem.
    std::optional<Field> boundary_data;
};

void validate(const ProblemSpec& spec, const SpaceTimeGrid& grid);

/// p_lambda on the whole ball, started from E_0 g. The absorption term
/// lambda 1_{closed inner ball} is always implicit; on the interface node it
/// acts on the inner half cell only.
Field solve_doi(const ProblemSpec& spec, const GridPtr& grid);

/// rho on the annulus with rho(t, a) = 0 for t > 0 and zero flux at r = R.
Field solve_smoluchowski(const ProblemSpec& spec, const GridPtr& grid);

/// u_t - kappa Lap u = f with zero flux at r = R. With dirichlet_inner the
/// problem lives on the annulus and u = h on r = a (h from boundary_data,
/// zero when absent); otherwise it lives on the whole ball and carries the
/// Doi absorption term with spec.lambda.
Field solve_forced(const ProblemSpec& spec, const GridPtr& grid, bool dirichlet_inner);

/// w solving (-d/dt - kappa Lap) w = v, w = 0 on r = a, zero flux at r = R,
/// w(T) = 0. Computed as a forward forced solve in reversed time.
Field solve_auxiliary(const Field& v, const ProblemSpec& spec, const GridPtr& grid);

struct CouplingResiduals {
    double value_jump = 0.0;
    /// max_t |d_r p+ - d_r p-| at r = a over max |grad p|, one-sided
    /// three-point differences on each side.
    double flux_jump = 0.0;
};

CouplingResiduals coupling_residuals(const Field& full_field);

/// True when the solver for this problem will take the two-half-step start.
/// interface_jump is |u_0(a) - h(0)| for Dirichlet problems and |g(a)| for Doi.
bool startup_smoothing_active(const ProblemSpec& spec, double interface_jump);

/// (S u)_i for the symmetric positive semidefinite diffusion matrix
/// S = -kappa K over nodes [first, first + values.size()); natural (zero
/// flux) closure at both ends of the window.
void apply_diffusion(const SpaceTimeGrid& grid, double kappa, int first,
                     std::span<const double> values, std::span<double> out);

}  // namespace doismol
