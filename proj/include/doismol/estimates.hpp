#pragma once

#include "doismol/domain_grid.hpp"
#include "doismol/norms.hpp"
#include "doismol/solvers.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace doismol {

struct EnergyTerm {
    std::string name;
    double value = 0.0;
};

/// Bounds read off the energy identities: sup ||p||^2 <= K1,
/// ||grad p||^2_Q <= K2, ||p||^2_Q0 <= K1 / (2 lambda), and with g(a) = 0
/// sup ||grad p||^2 <= C1, ||p_t||^2_Q <= C2, sup ||p||^2_Omega0 <= C3 / lambda.
struct EnergyConstants {
    double K1 = 0.0;
    double K2 = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double C3 = 0.0;
};

struct EnergyReport {
    std::string identity;
    std::vector<EnergyTerm> lhs_terms;
    double rhs = 0.0;
    /// |sum(lhs) - rhs| / rhs; zero for a degenerate (zero-datum) report.
    double residual = 0.0;
    /// Non-negative dissipation of the time stepper that the continuous
    /// identity does not have (backward Euler, implicit absorption).
    double scheme_dissipation = 0.0;
    /// |sum(lhs) + scheme_dissipation - rhs| / rhs; round-off for every scheme.
    double closure_residual = 0.0;
    EnergyConstants constants;
    bool degenerate = false;
    std::vector<std::string> flags;

    double lhs_sum() const;
    double term(std::string_view name) const;
};

struct EnergyOptions {
    /// Debug fault: evaluate the absorption term with the wrong sign.
    bool flip_lambda_sign = false;
};

/// 1/2 ||p(T)||^2 + kappa ||grad p||^2_Q + lambda ||p||^2_Q0 = 1/2 ||E_0 g||^2,
/// with time quadrature mirroring the scheme (midpoint values for
/// Crank-Nicolson, end-of-step values for backward Euler).
EnergyReport check_energy_doi(const Field& p, const ProblemSpec& spec, const GridPtr& grid,
                              const EnergyOptions& options = {});

/// ||p_t||^2_Q + kappa/2 ||grad p(T)||^2 + lambda/2 ||p(T)||^2_Omega0
///   = kappa/2 ||grad E_0 g||^2, with p_t the backward difference quotient.
EnergyReport check_energy_doi_refined(const Field& p, const ProblemSpec& spec,
                                      const GridPtr& grid, const EnergyOptions& options = {});

struct SmolEnergyReports {
    /// 1/2 ||rho(T)||^2 + kappa ||grad rho||^2_Q1 = 1/2 ||g||^2.
    EnergyReport mass;
    /// ||rho_t||^2_Q1 + kappa/2 ||grad rho(T)||^2 = kappa/2 ||grad g||^2.
    EnergyReport gradient;
    /// Time levels where ||rho(t)|| and ||grad rho(t)|| peak.
    int mass_sup_level = 0;
    int gradient_sup_level = 0;
};

SmolEnergyReports check_energy_smol(const Field& rho, const ProblemSpec& spec,
                                    const GridPtr& grid);

struct TraceBoundRow {
    double eps = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool violated = false;
};

struct TraceBoundTable {
    std::vector<TraceBoundRow> rows;
    NormRegion region = NormRegion::Q0;
    double prefactor = 1.0;
    double trace_norm = 0.0;
    double volume_norm = 0.0;
    double gradient_norm = 0.0;
    /// Minimiser of (1/eps) ||u|| + eps ||Du||, sqrt(||u|| / ||Du||).
    double optimal_eps = 0.0;
    int violations = 0;
};

/// Largest ratio ||trace|| / ((1/eps) ||u|| + eps ||Du||) over eps_list.
double fit_trace_prefactor(const Field& calibration, const std::vector<double>& eps_list);

/// ||u||_{L2(Sigma0)} against prefactor * ((1/eps) ||u|| + eps ||Du||), the
/// volume norms taken over Q0 for ball fields and Q1 for annulus fields.
TraceBoundTable check_modified_trace(const Field& u, const std::vector<double>& eps_list,
                                     double prefactor);

/// Same, with the prefactor fitted on the constant field 1 of u's grid and region.
TraceBoundTable check_modified_trace(const Field& u, const std::vector<double>& eps_list);

struct TranspositionTerms {
    double volume_pairing = 0.0;    // int_Q1 e v
    double boundary_pairing = 0.0;  // kappa int_Sigma0 h dw/dn
    double residual = 0.0;
};

/// Checks int_Q1 e v = kappa int_Sigma0 h dw/dn for w = solve_auxiliary(v),
/// dw/dn the derivative along the normal pointing from Gamma_0 into Omega_1,
/// taken with a one-sided three-point stencil.
TranspositionTerms transposition_terms(const Field& e, const Field& h, const Field& v,
                                       const ProblemSpec& spec, const GridPtr& grid);

/// |int e v - kappa int h dw/dn| / (||e|| ||v||); zero when either norm vanishes.
double transposition_residual(const Field& e, const Field& h, const Field& v,
                              const ProblemSpec& spec, const GridPtr& grid);

/// ||e||_{L2(Q1)} / ||h||_{L2(Sigma0)}; throws DegenerateError when h = 0.
double main_bound_ratio(const Field& e, const Field& h);

}  // namespace doismol
