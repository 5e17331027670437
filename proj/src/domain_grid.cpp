#include "doismol/domain_grid.hpp"

#include "doismol/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

namespace doismol {

RadialDomain::RadialDomain(int dimension, double inner_radius, double outer_radius)
    : dimension_(dimension), inner_radius_(inner_radius), outer_radius_(outer_radius)
{
    if (dimension < 1) {
        throw ValidationError(fmt::format("dimension m must be >= 1, got {}", dimension));
    }
    if (!(inner_radius > 0.0) || !std::isfinite(inner_radius)) {
        throw ValidationError(fmt::format("inner radius a must be > 0, got {}", inner_radius));
    }
    if (!(outer_radius > inner_radius) || !std::isfinite(outer_radius)) {
        throw ValidationError(fmt::format("outer radius R must exceed a = {}, got {}",
                                          inner_radius, outer_radius));
    }
    const double half_m = 0.5 * dimension;
    sphere_area_ = 2.0 * std::pow(std::numbers::pi, half_m) / std::tgamma(half_m);
}

double RadialDomain::shell_area(double radius) const
{
    return sphere_area_ * std::pow(radius, dimension_ - 1);
}

double RadialDomain::ball_volume(double radius) const
{
    return sphere_area_ * std::pow(radius, dimension_) / dimension_;
}

RadialDomain build_domain(int dimension, double inner_radius, double outer_radius)
{
    return RadialDomain(dimension, inner_radius, outer_radius);
}

SpaceTimeGrid::SpaceTimeGrid(const RadialDomain& domain, double final_time,
                             int time_steps, int radial_cells)
    : domain_(domain), final_time_(final_time), time_steps_(time_steps),
      radial_cells_(radial_cells)
{
    if (!(final_time > 0.0) || !std::isfinite(final_time)) {
        throw ValidationError(fmt::format("final time T must be > 0, got {}", final_time));
    }
    if (time_steps < 1) {
        throw ValidationError(fmt::format("Nt must be >= 1, got {}", time_steps));
    }
    if (radial_cells < 2) {
        throw ValidationError(fmt::format("Nr must be >= 2, got {}", radial_cells));
    }
    h_ = domain.outer_radius() / radial_cells;
    dt_ = final_time / time_steps;

    const double cells_inside = domain.inner_radius() / h_;
    const double rounded = std::round(cells_inside);
    if (std::abs(cells_inside - rounded) > 1e-9 * std::max(1.0, cells_inside)) {
        throw ValidationError(fmt::format(
            "grid misaligned: a/h = {} is not an integer (a = {}, h = {})", cells_inside,
            domain.inner_radius(), h_));
    }
    interface_index_ = static_cast<int>(rounded);
    // One-sided three-point stencils at the interface need two cells per side.
    if (interface_index_ < 2 || radial_cells - interface_index_ < 2) {
        throw ValidationError(fmt::format(
            "grid too coarse: need at least two cells on each side of r = a (j0 = {}, Nr = {})",
            interface_index_, radial_cells));
    }

    const int m = domain.dimension();
    const double a = domain.inner_radius();
    const double omega = domain.sphere_area();
    auto ball = [&](double radius) { return omega * std::pow(radius, m) / m; };
    auto face_radius = [&](int j) { return (j + 0.5) * h_; };

    cell_volume_.resize(nodes());
    inner_volume_.assign(nodes(), 0.0);
    face_area_.resize(radial_cells_);
    for (int j = 0; j < nodes(); ++j) {
        const double lo = j == 0 ? 0.0 : face_radius(j - 1);
        const double hi = j == radial_cells_ ? domain.outer_radius() : face_radius(j);
        cell_volume_[j] = ball(hi) - ball(lo);
        if (j < interface_index_) {
            inner_volume_[j] = cell_volume_[j];
        } else if (j == interface_index_) {
            inner_volume_[j] = ball(a) - ball(lo);
        }
    }
    for (int j = 0; j < radial_cells_; ++j) {
        face_area_[j] = domain.shell_area(face_radius(j));
    }
}

double SpaceTimeGrid::time_weight(int n) const
{
    return (n == 0 || n == time_steps_) ? 0.5 * dt_ : dt_;
}

SpaceTimeGrid SpaceTimeGrid::refined(int space_factor, int time_factor) const
{
    if (space_factor < 1 || time_factor < 1) {
        throw ValidationError("refinement factors must be >= 1");
    }
    return SpaceTimeGrid(domain_, final_time_, time_steps_ * time_factor,
                         radial_cells_ * space_factor);
}

GridPtr make_grid(const RadialDomain& domain, double final_time, int time_steps,
                  int radial_cells)
{
    return std::make_shared<const SpaceTimeGrid>(domain, final_time, time_steps,
                                                 radial_cells);
}

std::string_view to_string(Region region)
{
    switch (region) {
    case Region::FullBall: return "FullBall";
    case Region::Annulus: return "Annulus";
    case Region::InnerBall: return "InnerBall";
    case Region::LateralBoundary: return "LateralBoundary";
    }
    return "?";
}

NodeRange node_range(const SpaceTimeGrid& grid, Region region)
{
    const int j0 = grid.interface_index();
    switch (region) {
    case Region::FullBall: return {0, grid.nodes()};
    case Region::Annulus: return {j0, grid.nodes() - j0};
    case Region::InnerBall: return {0, j0 + 1};
    case Region::LateralBoundary: return {j0, 1};
    }
    throw ValidationError("unknown region");
}

Field::Field(GridPtr grid, Region region, std::vector<double> values)
    : grid_(std::move(grid)), region_(region), values_(std::move(values))
{
    if (!grid_) {
        throw ValidationError("field requires a grid");
    }
    const auto range = node_range(*grid_, region_);
    first_node_ = range.first;
    width_ = range.width;
    const auto expected = static_cast<std::size_t>(grid_->time_levels()) * width_;
    if (values_.size() != expected) {
        throw ValidationError(fmt::format("{} field needs {} values, got {}",
                                          to_string(region_), expected, values_.size()));
    }
    const auto bad = std::find_if(values_.begin(), values_.end(),
                                  [](double v) { return !std::isfinite(v); });
    if (bad != values_.end()) {
        const auto offset = static_cast<std::size_t>(bad - values_.begin());
        throw ValidationError(fmt::format("non-finite field value at time level {}",
                                          offset / width_));
    }
}

Field Field::zeros(GridPtr grid, Region region)
{
    const auto range = node_range(*grid, region);
    std::vector<double> values(static_cast<std::size_t>(grid->time_levels()) * range.width,
                               0.0);
    return Field(std::move(grid), region, std::move(values));
}

double Field::max_abs() const
{
    double result = 0.0;
    for (double v : values_) {
        result = std::max(result, std::abs(v));
    }
    return result;
}

namespace {

void require_same_layout(const Field& lhs, const Field& rhs)
{
    if (lhs.grid_ptr() != rhs.grid_ptr() && !(lhs.grid().domain() == rhs.grid().domain()
                                               && lhs.grid().nodes() == rhs.grid().nodes()
                                               && lhs.levels() == rhs.levels()
                                               && lhs.grid().final_time()
                                                      == rhs.grid().final_time())) {
        throw ValidationError("fields live on different grids");
    }
    if (lhs.region() != rhs.region()) {
        throw ValidationError(fmt::format("region mismatch: {} vs {}", to_string(lhs.region()),
                                          to_string(rhs.region())));
    }
}

void require_region(const Field& field, Region expected, std::string_view op)
{
    if (field.region() != expected) {
        throw ValidationError(fmt::format("{} expects a {} field, got {}", op,
                                          to_string(expected), to_string(field.region())));
    }
}

template <class Op>
Field combine(const Field& lhs, const Field& rhs, Op op)
{
    require_same_layout(lhs, rhs);
    std::vector<double> values(lhs.values().size());
    std::transform(lhs.values().begin(), lhs.values().end(), rhs.values().begin(),
                   values.begin(), op);
    return Field(lhs.grid_ptr(), lhs.region(), std::move(values));
}

// Copies the node window [first, first + width) of every time level.
Field reslice(const Field& field, Region target)
{
    const auto range = node_range(field.grid(), target);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(field.levels()) * range.width);
    for (int n = 0; n < field.levels(); ++n) {
        for (int j = range.first; j < range.first + range.width; ++j) {
            values.push_back(field.at(n, j));
        }
    }
    return Field(field.grid_ptr(), target, std::move(values));
}

}  // namespace

Field operator+(const Field& lhs, const Field& rhs)
{
    return combine(lhs, rhs, std::plus<>{});
}

Field operator-(const Field& lhs, const Field& rhs)
{
    return combine(lhs, rhs, std::minus<>{});
}

Field operator*(double scale, const Field& field)
{
    std::vector<double> values(field.values().begin(), field.values().end());
    for (double& v : values) {
        v *= scale;
    }
    return Field(field.grid_ptr(), field.region(), std::move(values));
}

Field extend_by_zero(const Field& annulus_field)
{
    require_region(annulus_field, Region::Annulus, "extend_by_zero");
    const auto& grid = annulus_field.grid();
    const int j0 = grid.interface_index();
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(grid.time_levels()) * grid.nodes());
    for (int n = 0; n < grid.time_levels(); ++n) {
        values.insert(values.end(), j0, 0.0);
        const auto row = annulus_field.level(n);
        values.insert(values.end(), row.begin(), row.end());
    }
    return Field(annulus_field.grid_ptr(), Region::FullBall, std::move(values));
}

Field restrict_outer(const Field& full_field)
{
    require_region(full_field, Region::FullBall, "restrict_outer");
    return reslice(full_field, Region::Annulus);
}

Field restrict_inner(const Field& full_field)
{
    require_region(full_field, Region::FullBall, "restrict_inner");
    return reslice(full_field, Region::InnerBall);
}

Field lateral_trace(const Field& field)
{
    if (field.region() == Region::LateralBoundary) {
        return field;
    }
    return reslice(field, Region::LateralBoundary);
}

Field time_reversed(const Field& field)
{
    std::vector<double> values;
    values.reserve(field.values().size());
    for (int n = field.levels() - 1; n >= 0; --n) {
        const auto row = field.level(n);
        values.insert(values.end(), row.begin(), row.end());
    }
    return Field(field.grid_ptr(), field.region(), std::move(values));
}

}  // namespace doismol
