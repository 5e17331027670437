#include "doismol/estimates.hpp"

#include "doismol/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

namespace doismol {

namespace {

void require_matching(const Field& field, const ProblemSpec& spec, const GridPtr& grid,
                      Region region, const char* what)
{
    if (field.region() != region) {
        throw ValidationError(fmt::format("{} expects a {} field, got {}", what,
                                          to_string(region), to_string(field.region())));
    }
    validate(spec, *grid);
    if (field.levels() != grid->time_levels() || field.grid().nodes() != grid->nodes()
        || !(field.grid().domain() == grid->domain())) {
        throw ValidationError(fmt::format("{}: field and grid disagree", what));
    }
}

// One time step of a homogeneous run: from -> to with step tau and weight theta.
struct Step {
    std::vector<double> from;
    std::vector<double> to;
    double tau;
    double theta;
};

std::vector<double> copy_level(const Field& field, int n)
{
    const auto row = field.level(n);
    return {row.begin(), row.end()};
}

// Rebuilds the step sequence the solver took, including the state between
// the two startup half steps: a backward-Euler step a -> b with step tau
// satisfies a = b + tau M^{-1} (S b + Lambda b).
std::vector<Step> replay(const Field& field, const ProblemSpec& spec, double lambda,
                         bool dirichlet)
{
    const auto& grid = field.grid();
    const double dt = grid.dt();
    const double jump = std::abs(field.at(0, grid.interface_index()));
    const bool smoothing = startup_smoothing_active(spec, jump);
    const double theta = spec.scheme == Scheme::CrankNicolson ? 0.5 : 1.0;

    std::vector<Step> steps;
    steps.reserve(field.levels());
    for (int n = 0; n + 1 < field.levels(); ++n) {
        if (n == 0 && smoothing) {
            const double tau = 0.5 * dt;
            auto end = copy_level(field, 1);
            std::vector<double> diffusion(end.size());
            apply_diffusion(grid, spec.kappa, field.first_node(), end, diffusion);
            std::vector<double> half(end.size());
            for (std::size_t i = 0; i < end.size(); ++i) {
                const int j = field.first_node() + static_cast<int>(i);
                const double mass = dirichlet ? grid.outer_volume(j) : grid.cell_volume(j);
                const double absorb = dirichlet ? 0.0 : lambda * grid.inner_volume(j);
                half[i] = end[i] + tau * (diffusion[i] + absorb * end[i]) / mass;
            }
            if (dirichlet) {
                half[0] = 0.0;
            }
            steps.push_back({copy_level(field, 0), half, tau, 1.0});
            steps.push_back({std::move(half), std::move(end), tau, 1.0});
        } else {
            steps.push_back({copy_level(field, n), copy_level(field, n + 1), dt, theta});
        }
    }
    return steps;
}

double inner_product(const SpaceTimeGrid& grid, NormRegion region, int first,
                     std::span<const double> a, std::span<const double> b)
{
    // <a, b> = (|a+b|^2 - |a-b|^2) / 4 keeps one quadrature code path.
    std::vector<double> sum(a.size()), diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum[i] = a[i] + b[i];
        diff[i] = a[i] - b[i];
    }
    return 0.25 * (spatial_l2_squared(grid, region, first, sum)
                   - spatial_l2_squared(grid, region, first, diff));
}

std::vector<double> midpoint(const Step& step)
{
    std::vector<double> mid(step.from.size());
    for (std::size_t i = 0; i < mid.size(); ++i) {
        mid[i] = 0.5 * (step.from[i] + step.to[i]);
    }
    return mid;
}

std::vector<double> increment(const Step& step)
{
    std::vector<double> inc(step.from.size());
    for (std::size_t i = 0; i < inc.size(); ++i) {
        inc[i] = step.to[i] - step.from[i];
    }
    return inc;
}

void finish(EnergyReport& report)
{
    const double lhs = report.lhs_sum();
    if (report.rhs == 0.0 && lhs == 0.0 && report.scheme_dissipation == 0.0) {
        report.degenerate = true;
        report.residual = 0.0;
        report.closure_residual = 0.0;
        report.flags.push_back("degenerate: zero datum");
        return;
    }
    const double scale = report.rhs != 0.0 ? std::abs(report.rhs) : 1.0;
    report.residual = std::abs(lhs - report.rhs) / scale;
    report.closure_residual = std::abs(lhs + report.scheme_dissipation - report.rhs) / scale;
}

EnergyConstants constants_from(const SpaceTimeGrid& grid, NormRegion region, int first,
                               std::span<const double> initial, double kappa)
{
    EnergyConstants c;
    c.K1 = spatial_l2_squared(grid, region, first, initial);
    c.K2 = c.K1 / (2.0 * kappa);
    const double grad0 = spatial_grad_squared(grid, region, first, initial);
    c.C1 = grad0;
    c.C2 = 0.5 * kappa * grad0;
    c.C3 = kappa * grad0;
    return c;
}

// Shared driver for the mass identity: works for the Doi problem (whole
// ball, absorption on Q0) and the Smoluchowski problem (annulus, no
// absorption).
EnergyReport mass_identity(const Field& u, const ProblemSpec& spec, double lambda,
                           NormRegion region, bool dirichlet, std::string identity)
{
    const auto& grid = u.grid();
    const int first = u.first_node();
    const auto steps = replay(u, spec, std::abs(lambda), dirichlet);

    double kappa_term = 0.0;
    double lambda_term = 0.0;
    double dissipation = 0.0;
    for (const auto& step : steps) {
        if (step.theta == 0.5) {
            const auto mid = midpoint(step);
            kappa_term += step.tau * spec.kappa * spatial_grad_squared(grid, region, first, mid);
            if (!dirichlet) {
                lambda_term += step.tau * lambda
                               * inner_product(grid, NormRegion::Q0, first, step.to, mid);
            }
        } else {
            kappa_term
                += step.tau * spec.kappa * spatial_grad_squared(grid, region, first, step.to);
            if (!dirichlet) {
                lambda_term += step.tau * lambda
                               * spatial_l2_squared(grid, NormRegion::Q0, first, step.to);
            }
            dissipation += 0.5 * spatial_l2_squared(grid, region, first, increment(step));
        }
    }

    EnergyReport report;
    report.identity = std::move(identity);
    report.lhs_terms.push_back(
        {"half_final_mass",
         0.5 * spatial_l2_squared(grid, region, first, u.level(u.levels() - 1))});
    report.lhs_terms.push_back({"kappa_grad_term", kappa_term});
    if (!dirichlet) {
        report.lhs_terms.push_back({"lambda_interior_term", lambda_term});
    }
    report.rhs = 0.5 * spatial_l2_squared(grid, region, first, u.level(0));
    report.scheme_dissipation = dissipation;
    report.constants = constants_from(grid, region, first, u.level(0), spec.kappa);
    finish(report);
    return report;
}

EnergyReport gradient_identity(const Field& u, const ProblemSpec& spec, double lambda,
                               NormRegion region, bool dirichlet, std::string identity)
{
    const auto& grid = u.grid();
    const int first = u.first_node();
    const auto steps = replay(u, spec, std::abs(lambda), dirichlet);

    double rate_term = 0.0;
    double dissipation = 0.0;
    for (const auto& step : steps) {
        const auto inc = increment(step);
        rate_term += spatial_l2_squared(grid, region, first, inc) / step.tau;
        const double absorbed
            = dirichlet ? 0.0 : lambda * spatial_l2_squared(grid, NormRegion::Q0, first, inc);
        if (step.theta == 0.5) {
            dissipation += 0.5 * absorbed;
        } else {
            dissipation += 0.5 * (spec.kappa * spatial_grad_squared(grid, region, first, inc)
                                  + absorbed);
        }
    }

    const auto final_level = u.level(u.levels() - 1);
    EnergyReport report;
    report.identity = std::move(identity);
    report.lhs_terms.push_back({"time_derivative_term", rate_term});
    report.lhs_terms.push_back(
        {"half_kappa_final_grad",
         0.5 * spec.kappa * spatial_grad_squared(grid, region, first, final_level)});
    if (!dirichlet) {
        report.lhs_terms.push_back(
            {"half_lambda_final_interior",
             0.5 * lambda * spatial_l2_squared(grid, NormRegion::Q0, first, final_level)});
    }
    report.rhs = 0.5 * spec.kappa * spatial_grad_squared(grid, region, first, u.level(0));
    const double initial_interior
        = dirichlet ? 0.0 : spatial_l2_squared(grid, NormRegion::Q0, first, u.level(0));
    if (initial_interior != 0.0) {
        // E_0 g is only H^1 when g(a) = 0; keep the identity closed anyway.
        report.rhs += 0.5 * lambda * initial_interior;
        report.flags.push_back("initial datum does not vanish at r = a");
    }
    if (dirichlet && u.at(0, grid.interface_index()) != 0.0) {
        report.flags.push_back("initial datum does not vanish at r = a");
    }
    report.scheme_dissipation = dissipation;
    report.constants = constants_from(grid, region, first, u.level(0), spec.kappa);
    finish(report);
    return report;
}

Field constant_field(const Field& like)
{
    return Field::sample(like.grid_ptr(), like.region(), [](double, double) { return 1.0; });
}

NormRegion volume_region(const Field& u)
{
    switch (u.region()) {
    case Region::FullBall:
    case Region::InnerBall: return NormRegion::Q0;
    case Region::Annulus: return NormRegion::Q1;
    case Region::LateralBoundary: break;
    }
    throw ValidationError("modified trace bound needs a volume field");
}

}  // namespace

double EnergyReport::lhs_sum() const
{
    return std::accumulate(lhs_terms.begin(), lhs_terms.end(), 0.0,
                           [](double acc, const EnergyTerm& t) { return acc + t.value; });
}

double EnergyReport::term(std::string_view name) const
{
    for (const auto& t : lhs_terms) {
        if (t.name == name) {
            return t.value;
        }
    }
    throw ValidationError(fmt::format("energy report has no term '{}'", name));
}

EnergyReport check_energy_doi(const Field& p, const ProblemSpec& spec, const GridPtr& grid,
                              const EnergyOptions& options)
{
    require_matching(p, spec, grid, Region::FullBall, "check_energy_doi");
    const double lambda = options.flip_lambda_sign ? -spec.lambda : spec.lambda;
    auto report = mass_identity(p, spec, lambda, NormRegion::Q, false, "doi_uniform_l2");
    report.constants = constants_from(p.grid(), NormRegion::Q, 0, p.level(0), spec.kappa);
    return report;
}

EnergyReport check_energy_doi_refined(const Field& p, const ProblemSpec& spec,
                                      const GridPtr& grid, const EnergyOptions& options)
{
    require_matching(p, spec, grid, Region::FullBall, "check_energy_doi_refined");
    const double lambda = options.flip_lambda_sign ? -spec.lambda : spec.lambda;
    return gradient_identity(p, spec, lambda, NormRegion::Q, false, "doi_refined");
}

SmolEnergyReports check_energy_smol(const Field& rho, const ProblemSpec& spec,
                                    const GridPtr& grid)
{
    require_matching(rho, spec, grid, Region::Annulus, "check_energy_smol");
    SmolEnergyReports out;
    out.mass = mass_identity(rho, spec, 0.0, NormRegion::Q1, true, "smol_mass");
    out.gradient = gradient_identity(rho, spec, 0.0, NormRegion::Q1, true, "smol_gradient");
    double best_mass = -1.0;
    double best_grad = -1.0;
    for (int n = 0; n < rho.levels(); ++n) {
        const double mass = slice_l2(rho, n, NormRegion::Q1);
        const double grad = slice_grad_l2(rho, n, NormRegion::Q1);
        if (mass > best_mass) {
            best_mass = mass;
            out.mass_sup_level = n;
        }
        if (grad > best_grad) {
            best_grad = grad;
            out.gradient_sup_level = n;
        }
    }
    return out;
}

double fit_trace_prefactor(const Field& calibration, const std::vector<double>& eps_list)
{
    const NormRegion region = volume_region(calibration);
    const double trace = l2(lateral_trace(calibration), NormRegion::Sigma0);
    const double volume = l2(calibration, region);
    const double gradient = grad_l2(calibration, region);
    double prefactor = 0.0;
    for (double eps : eps_list) {
        if (!(eps > 0.0)) {
            throw ValidationError(fmt::format("trace bound eps must be > 0, got {}", eps));
        }
        const double raw = volume / eps + eps * gradient;
        if (raw > 0.0) {
            prefactor = std::max(prefactor, trace / raw);
        }
    }
    if (prefactor == 0.0) {
        throw DegenerateError("calibration field has zero trace or zero norm");
    }
    return prefactor;
}

TraceBoundTable check_modified_trace(const Field& u, const std::vector<double>& eps_list,
                                     double prefactor)
{
    for (double eps : eps_list) {
        if (!(eps > 0.0)) {
            throw ValidationError(fmt::format("trace bound eps must be > 0, got {}", eps));
        }
    }
    TraceBoundTable table;
    table.region = volume_region(u);
    table.prefactor = prefactor;
    table.trace_norm = l2(lateral_trace(u), NormRegion::Sigma0);
    table.volume_norm = l2(u, table.region);
    table.gradient_norm = grad_l2(u, table.region);
    table.optimal_eps = table.gradient_norm > 0.0
                            ? std::sqrt(table.volume_norm / table.gradient_norm)
                            : 0.0;
    for (double eps : eps_list) {
        TraceBoundRow row;
        row.eps = eps;
        row.lhs = table.trace_norm;
        row.rhs = prefactor * (table.volume_norm / eps + eps * table.gradient_norm);
        row.violated = row.lhs > row.rhs * (1.0 + 1e-12);
        table.violations += row.violated ? 1 : 0;
        table.rows.push_back(row);
    }
    return table;
}

TraceBoundTable check_modified_trace(const Field& u, const std::vector<double>& eps_list)
{
    return check_modified_trace(u, eps_list, fit_trace_prefactor(constant_field(u), eps_list));
}

TranspositionTerms transposition_terms(const Field& e, const Field& h, const Field& v,
                                       const ProblemSpec& spec, const GridPtr& grid)
{
    require_matching(e, spec, grid, Region::Annulus, "transposition (error field)");
    if (h.region() != Region::LateralBoundary || v.region() != Region::Annulus) {
        throw ValidationError("transposition needs h on Sigma0 and v on the annulus");
    }
    const auto w = solve_auxiliary(v, spec, grid);
    const int j0 = grid->interface_index();
    const double dr = grid->h();
    const double area = grid->domain().shell_area(grid->domain().inner_radius());

    TranspositionTerms terms;
    for (int n = 0; n < grid->time_levels(); ++n) {
        terms.volume_pairing += grid->time_weight(n)
                                * inner_product(*grid, NormRegion::Q1, j0, e.level(n), v.level(n));
        const double normal_derivative
            = (-3.0 * w.at(n, j0) + 4.0 * w.at(n, j0 + 1) - w.at(n, j0 + 2)) / (2.0 * dr);
        terms.boundary_pairing += grid->time_weight(n) * area * spec.kappa * h.at(n, j0)
                                  * normal_derivative;
    }
    const double scale = l2(e, NormRegion::Q1) * l2(v, NormRegion::Q1);
    terms.residual
        = scale > 0.0 ? std::abs(terms.volume_pairing - terms.boundary_pairing) / scale : 0.0;
    return terms;
}

double transposition_residual(const Field& e, const Field& h, const Field& v,
                              const ProblemSpec& spec, const GridPtr& grid)
{
    return transposition_terms(e, h, v, spec, grid).residual;
}

double main_bound_ratio(const Field& e, const Field& h)
{
    const double boundary = l2(lateral_trace(h), NormRegion::Sigma0);
    if (boundary == 0.0) {
        throw DegenerateError("main_bound_ratio: boundary datum is zero");
    }
    return l2(e, NormRegion::Q1) / boundary;
}

}  // namespace doismol
