#pragma once

#include "doismol/domain_grid.hpp"
#include "doismol/solvers.hpp"

#include <string>
#include <vector>

namespace doismol {

enum class QuantityKind {
    InteriorL2Q0,       // ||p||_{L2(Q0)}
    InteriorSupTL2,     // sup_t ||p(t)||_{L2(Omega0)}
    TraceL2Sigma0,      // ||p||_{L2(Sigma0)}
    ExteriorErrorL2Q1,  // ||R_1 p - rho||_{L2(Q1)}
    FracInterior,       // hrs surrogate of R_0 p with orders (eps1, eps2)
    FracExterior,       // hrs surrogate of R_1 p - rho with orders (delta1, delta2)
    MainBoundRatio,     // ||R_1 p - rho||_{L2(Q1)} / ||p||_{L2(Sigma0)}
};

struct Quantity {
    QuantityKind kind = QuantityKind::InteriorL2Q0;
    double first_order = 0.0;
    double second_order = 0.0;

    /// Parses "interior_l2q0", "frac_interior(0.6,0.6)", ... ; throws
    /// ValidationError on unknown names or orders outside (0,1).
    static Quantity parse(const std::string& text);

    std::string name() const;
    /// alpha in value = O(lambda^-alpha); zero for main_bound_ratio.
    double claimed_exponent() const;
    /// Needs the Smoluchowski solve and is subject to the discretization floor.
    bool exterior() const;
};

/// count values geometrically spaced from lo to hi inclusive.
std::vector<double> geometric_lambdas(double lo, double hi, int count);

struct SweepSpec {
    std::vector<double> lambdas;
    std::vector<Quantity> quantities;
    ProblemSpec problem{RadialDomain(3, 1.0, 2.0)};
    GridPtr grid;
    int jobs = 1;
};

void validate(const SweepSpec& spec);

struct SweepRow {
    double lambda = 0.0;
    std::string quantity;
    double value = 0.0;
};

struct SweepResult {
    /// Ordered by lambda, then by the order of spec.quantities.
    std::vector<SweepRow> rows;
    /// ||rho - series||_{L2(Q1)}; zero when no exterior quantity was requested
    /// or the oracle does not cover the dimension.
    double discretization_floor = 0.0;
};

/// Solves the Doi problem once per lambda (in parallel over spec.jobs
/// workers) and the Smoluchowski problem once. Solver failures are rethrown
/// with the offending lambda in the message.
SweepResult run_sweep(const SweepSpec& spec);

struct RateFit {
    std::string quantity;
    double claimed_exponent = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    /// max over the fitted points of value * lambda^alpha.
    double bound_margin = 0.0;
    /// value * lambda^alpha does not increase over the top half of the sweep.
    bool margin_nonincreasing = false;
    int points_used = 0;
    int points_dropped = 0;
};

/// Least squares of ln value on ln lambda over the rows of one quantity.
/// Points below 3 * floor are dropped for exterior quantities. Throws
/// DegenerateError on zero, negative or non-finite values, or when fewer
/// than two points remain.
RateFit fit_rate(const std::vector<SweepRow>& rows, const std::string& quantity,
                 double floor = 0.0);

struct ClaimVerdict {
    std::string quantity;
    double slope = 0.0;
    double claimed_exponent = 0.0;
    double bound_margin = 0.0;
    bool margin_nonincreasing = false;
    bool pass = false;
};

/// PASS iff slope <= -alpha + 0.05, or the margin is finite and does not
/// increase over the top half of the sweep.
std::vector<ClaimVerdict> check_claims(const std::vector<RateFit>& fits);

}  // namespace doismol
