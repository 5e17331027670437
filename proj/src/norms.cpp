#include "doismol/norms.hpp"

#include "doismol/errors.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace doismol {

namespace {

struct Window {
    int first;  // first global node
    int last;   // last global node, inclusive
};

Window nodes_of(const SpaceTimeGrid& grid, NormRegion region)
{
    const int j0 = grid.interface_index();
    switch (region) {
    case NormRegion::Q: return {0, grid.radial_cells()};
    case NormRegion::Q0: return {0, j0};
    case NormRegion::Q1: return {j0, grid.radial_cells()};
    case NormRegion::Sigma0: return {j0, j0};
    }
    throw ValidationError("unknown norm region");
}

double node_weight(const SpaceTimeGrid& grid, NormRegion region, int j)
{
    switch (region) {
    case NormRegion::Q: return grid.cell_volume(j);
    case NormRegion::Q0: return grid.inner_volume(j);
    case NormRegion::Q1: return grid.outer_volume(j);
    case NormRegion::Sigma0: return grid.domain().shell_area(grid.domain().inner_radius());
    }
    return 0.0;
}

void require_window(const SpaceTimeGrid& grid, NormRegion region, int first_node,
                    std::size_t count)
{
    const auto w = nodes_of(grid, region);
    const int last_node = first_node + static_cast<int>(count) - 1;
    if (w.first < first_node || w.last > last_node) {
        throw ValidationError(fmt::format("region {} needs nodes [{}, {}], values cover [{}, {}]",
                                          to_string(region), w.first, w.last, first_node,
                                          last_node));
    }
}

void require_fractional(double order, const char* name)
{
    if (!(order > 0.0 && order < 1.0)) {
        throw ValidationError(fmt::format("{} must lie strictly inside (0,1), got {}", name, order));
    }
}

}  // namespace

std::string_view to_string(NormRegion region)
{
    switch (region) {
    case NormRegion::Q: return "Q";
    case NormRegion::Q0: return "Q0";
    case NormRegion::Q1: return "Q1";
    case NormRegion::Sigma0: return "Sigma0";
    }
    return "?";
}

double spatial_l2_squared(const SpaceTimeGrid& grid, NormRegion region, int first_node,
                          std::span<const double> values)
{
    require_window(grid, region, first_node, values.size());
    const auto w = nodes_of(grid, region);
    double sum = 0.0;
    for (int j = w.first; j <= w.last; ++j) {
        const double u = values[j - first_node];
        sum += node_weight(grid, region, j) * u * u;
    }
    return sum;
}

double spatial_grad_squared(const SpaceTimeGrid& grid, NormRegion region, int first_node,
                            std::span<const double> values)
{
    if (region == NormRegion::Sigma0) {
        throw ValidationError("no radial gradient on Sigma0");
    }
    require_window(grid, region, first_node, values.size());
    const auto w = nodes_of(grid, region);
    double sum = 0.0;
    for (int j = w.first; j < w.last; ++j) {
        const double du = values[j + 1 - first_node] - values[j - first_node];
        sum += grid.face_area(j) * du * du / grid.h();
    }
    return sum;
}

double slice_l2(const Field& field, int level, NormRegion region)
{
    return std::sqrt(
        spatial_l2_squared(field.grid(), region, field.first_node(), field.level(level)));
}

double slice_grad_l2(const Field& field, int level, NormRegion region)
{
    return std::sqrt(
        spatial_grad_squared(field.grid(), region, field.first_node(), field.level(level)));
}

double l2(const Field& field, NormRegion region)
{
    const auto& grid = field.grid();
    double sum = 0.0;
    for (int n = 0; n < field.levels(); ++n) {
        sum += grid.time_weight(n)
               * spatial_l2_squared(grid, region, field.first_node(), field.level(n));
    }
    return std::sqrt(sum);
}

double grad_l2(const Field& field, NormRegion region)
{
    const auto& grid = field.grid();
    double sum = 0.0;
    for (int n = 0; n < field.levels(); ++n) {
        sum += grid.time_weight(n)
               * spatial_grad_squared(grid, region, field.first_node(), field.level(n));
    }
    return std::sqrt(sum);
}

double sup_t_l2(const Field& field, NormRegion region)
{
    double best = 0.0;
    for (int n = 0; n < field.levels(); ++n) {
        best = std::max(best, slice_l2(field, n, region));
    }
    return best;
}

double slobodeckii_time(const Field& field, double mu, NormRegion region)
{
    require_fractional(mu, "Slobodeckii order mu");
    const auto& grid = field.grid();
    require_window(grid, region, field.first_node(), static_cast<std::size_t>(field.width()));
    const auto w = nodes_of(grid, region);
    std::vector<double> weights;
    for (int j = w.first; j <= w.last; ++j) {
        weights.push_back(node_weight(grid, region, j));
    }
    const int offset = w.first - field.first_node();
    const int levels = field.levels();
    const double exponent = 1.0 + 2.0 * mu;

    double sum = 0.0;
    for (int n = 0; n < levels; ++n) {
        const auto un = field.level(n);
        for (int k = n + 1; k < levels; ++k) {
            const auto uk = field.level(k);
            double dist = 0.0;
            for (std::size_t i = 0; i < weights.size(); ++i) {
                const double d = un[offset + i] - uk[offset + i];
                dist += weights[i] * d * d;
            }
            const double gap = grid.t(k) - grid.t(n);
            sum += grid.time_weight(n) * grid.time_weight(k) * dist / std::pow(gap, exponent);
        }
    }
    // The double sum is symmetric in (n, k).
    return std::sqrt(2.0 * sum);
}

double interpolation_bound(double x0, double x1, double theta)
{
    if (x0 < 0.0 || x1 < 0.0) {
        throw ValidationError(
            fmt::format("interpolation_bound needs non-negative norms, got {} and {}", x0, x1));
    }
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw ValidationError(fmt::format("interpolation order must lie in [0,1], got {}", theta));
    }
    if (x0 == x1) {
        return x0;
    }
    return std::pow(x0, 1.0 - theta) * std::pow(x1, theta);
}

double hrs_surrogate(const Field& field, double space_order, double time_order,
                     NormRegion region)
{
    require_fractional(space_order, "space order r");
    require_fractional(time_order, "time order s");
    if (region == NormRegion::Sigma0) {
        throw ValidationError("hrs_surrogate needs a volume region");
    }
    const double base = l2(field, region);
    const double space = interpolation_bound(base, grad_l2(field, region), space_order);
    const double time = slobodeckii_time(field, time_order, region);
    return std::sqrt(base * base + space * space + time * time);
}

void validate(const NormSpec& spec)
{
    switch (spec.kind) {
    case NormKind::SloboTime: require_fractional(spec.mu, "Slobodeckii order mu"); break;
    case NormKind::Hrs:
        require_fractional(spec.r, "space order r");
        require_fractional(spec.mu, "time order s");
        break;
    default: break;
    }
    if (spec.time_level && spec.kind != NormKind::L2 && spec.kind != NormKind::GradL2) {
        throw ValidationError("a time slice only applies to L2 and GradL2");
    }
}

double evaluate(const Field& field, const NormSpec& spec)
{
    validate(spec);
    if (spec.time_level) {
        const int n = *spec.time_level;
        if (n < 0 || n >= field.levels()) {
            throw ValidationError(fmt::format("time level {} out of range", n));
        }
        return spec.kind == NormKind::L2 ? slice_l2(field, n, spec.region)
                                         : slice_grad_l2(field, n, spec.region);
    }
    switch (spec.kind) {
    case NormKind::L2: return l2(field, spec.region);
    case NormKind::GradL2: return grad_l2(field, spec.region);
    case NormKind::SupTL2: return sup_t_l2(field, spec.region);
    case NormKind::SloboTime: return slobodeckii_time(field, spec.mu, spec.region);
    case NormKind::Hrs: return hrs_surrogate(field, spec.r, spec.mu, spec.region);
    }
    return 0.0;
}

}  // namespace doismol
