#include "doismol/oracle.hpp"

#include "doismol/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/core.h>

namespace doismol {

namespace {

constexpr int kQuadraturePanels = 512;
constexpr int kMaxModes = 4096;

void require_three_dimensions(const RadialDomain& domain)
{
    if (domain.dimension() != 3) {
        throw ValidationError(
            fmt::format("eigenfunction oracle supports m = 3 only, got m = {}", domain.dimension()));
    }
}

double root_function(double length, double outer, double x)
{
    return length * std::sin(x) - x * outer * std::cos(x);
}

double root_slope(double length, double outer, double x)
{
    return (length - outer) * std::cos(x) + x * outer * std::sin(x);
}

double find_root(double length, double outer, double lo, double hi)
{
    double f_lo = root_function(length, outer, lo);
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = root_function(length, outer, mid);
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 3; ++iter) {
        const double slope = root_slope(length, outer, x);
        if (slope == 0.0) {
            break;
        }
        x -= root_function(length, outer, x) / slope;
    }
    return x;
}

template <class F>
double integrate(F&& f, double lo, double hi)
{
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const double width = (hi - lo) / kQuadraturePanels;
    double sum = 0.0;
    for (int p = 0; p < kQuadraturePanels; ++p) {
        sum += Rule::integrate(f, lo + p * width, lo + (p + 1) * width);
    }
    return sum;
}

EigenMode project(const RadialFunction& g, const RadialDomain& domain, double beta)
{
    const double a = domain.inner_radius();
    const double length = domain.outer_radius() - a;
    EigenMode mode;
    mode.beta = beta;
    mode.normalization = 0.5 * length - std::sin(2.0 * beta * length) / (4.0 * beta);
    const double inner = integrate(
        [&](double r) { return r * g(r) * std::sin(beta * (r - a)); }, a, domain.outer_radius());
    mode.coefficient = inner / mode.normalization;
    return mode;
}

double term_size(const EigenMode& mode, double kappa, double t)
{
    return std::abs(mode.coefficient) * std::exp(-kappa * mode.beta * mode.beta * t);
}

}  // namespace

std::vector<double> eigen_wavenumbers(const RadialDomain& domain, int count)
{
    require_three_dimensions(domain);
    if (count < 0) {
        throw ValidationError("mode count must be >= 0");
    }
    const double length = domain.outer_radius() - domain.inner_radius();
    const double outer = domain.outer_radius();
    std::vector<double> betas;
    betas.reserve(count);
    for (int k = 1; k <= count; ++k) {
        // k = 1: f < 0 just right of 0 because R > R - a.
        const double lo = k == 1 ? 1e-6 : (k - 1) * std::numbers::pi;
        const double hi = (k - 0.5) * std::numbers::pi;
        betas.push_back(find_root(length, outer, lo, hi) / length);
    }
    return betas;
}

double eigen_residual(const RadialDomain& domain, double beta)
{
    const double length = domain.outer_radius() - domain.inner_radius();
    const double x = beta * length;
    return std::abs(root_function(length, domain.outer_radius(), x))
           / (length + x * domain.outer_radius());
}

std::vector<EigenMode> eigen_modes(const RadialFunction& g, const RadialDomain& domain,
                                   int count)
{
    std::vector<EigenMode> modes;
    for (double beta : eigen_wavenumbers(domain, count)) {
        modes.push_back(project(g, domain, beta));
    }
    return modes;
}

int series_truncation(const RadialFunction& g, double kappa, const SpaceTimeGrid& grid)
{
    const auto& domain = grid.domain();
    require_three_dimensions(domain);
    const double length = domain.outer_radius() - domain.inner_radius();
    const double outer = domain.outer_radius();
    // Terms are sized at t = 0 so that the series also reproduces g itself.
    const double t = 0.0;
    constexpr int kTrailing = 10;

    double largest = 0.0;
    int quiet = 0;
    for (int k = 1; k <= kMaxModes; ++k) {
        const double lo = k == 1 ? 1e-6 : (k - 1) * std::numbers::pi;
        const double beta = find_root(length, outer, lo, (k - 0.5) * std::numbers::pi) / length;
        const double size = term_size(project(g, domain, beta), kappa, t);
        largest = std::max(largest, size);
        quiet = size <= 1e-10 * largest ? quiet + 1 : 0;
        if (quiet >= kTrailing) {
            return k - kTrailing;
        }
    }
    return kMaxModes;
}

Field series_solution(const RadialFunction& g, double kappa, const GridPtr& grid,
                      std::optional<int> modes)
{
    const int count = modes ? *modes : series_truncation(g, kappa, *grid);
    const auto expansion = eigen_modes(g, grid->domain(), count);
    const auto range = node_range(*grid, Region::Annulus);
    const double a = grid->domain().inner_radius();
    const int levels = grid->time_levels();

    std::vector<double> values(static_cast<std::size_t>(levels) * range.width, 0.0);
    std::vector<double> shape(range.width);
    for (const auto& mode : expansion) {
        for (int i = 0; i < range.width; ++i) {
            const double r = grid->r(range.first + i);
            shape[i] = std::sin(mode.beta * (r - a)) / r;
        }
        for (int n = 0; n < levels; ++n) {
            const double amp
                = mode.coefficient * std::exp(-kappa * mode.beta * mode.beta * grid->t(n));
            double* row = values.data() + static_cast<std::size_t>(n) * range.width;
            for (int i = 0; i < range.width; ++i) {
                row[i] += amp * shape[i];
            }
        }
    }
    return Field(grid, Region::Annulus, std::move(values));
}

ManufacturedData mms_source(const ManufacturedSolution& u, const ProblemSpec& spec,
                            const GridPtr& grid, Region region)
{
    if (region != Region::FullBall && region != Region::Annulus) {
        throw ValidationError("mms_source supports FullBall and Annulus regions");
    }
    const int m = grid->domain().dimension();
    const double kappa = spec.kappa;
    const double lambda = region == Region::FullBall ? spec.lambda : 0.0;

    auto laplacian = [&](double t, double r) {
        if (r == 0.0) {
            return m * u.radial_second_derivative(t, 0.0);
        }
        return u.radial_second_derivative(t, r) + (m - 1) / r * u.radial_derivative(t, r);
    };

    const auto range = node_range(*grid, region);
    std::vector<double> forcing;
    forcing.reserve(static_cast<std::size_t>(grid->time_levels()) * range.width);
    for (int n = 0; n < grid->time_levels(); ++n) {
        const double t = grid->t(n);
        for (int j = range.first; j < range.first + range.width; ++j) {
            const double r = grid->r(j);
            const double indicator = grid->inner_volume(j) / grid->cell_volume(j);
            forcing.push_back(u.time_derivative(t, r) - kappa * laplacian(t, r)
                              + lambda * indicator * u.value(t, r));
        }
    }
    Field exact = Field::sample(grid, region, u.value);
    Field boundary = lateral_trace(exact);
    return {Field(grid, region, std::move(forcing)), std::move(exact), std::move(boundary)};
}

}  // namespace doismol
