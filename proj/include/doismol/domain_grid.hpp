#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace doismol {

/// Concentric geometry: the ball B_R of dimension m containing the reactive
/// ball B_a. Everything downstream is radially symmetric.
class RadialDomain {
public:
    RadialDomain(int dimension, double inner_radius, double outer_radius);

    int dimension() const noexcept { return dimension_; }
    double inner_radius() const noexcept { return inner_radius_; }
    double outer_radius() const noexcept { return outer_radius_; }

    /// Area of the unit (m-1)-sphere, 2 pi^{m/2} / Gamma(m/2).
    double sphere_area() const noexcept { return sphere_area_; }

    /// Surface measure of the sphere r = radius.
    double shell_area(double radius) const;

    /// Volume of the ball r < radius.
    double ball_volume(double radius) const;

    bool operator==(const RadialDomain&) const = default;

private:
    int dimension_;
    double inner_radius_;
    double outer_radius_;
    double sphere_area_;
};

RadialDomain build_domain(int dimension, double inner_radius, double outer_radius);

/// Tensor grid on [0,T] x [0,R]. Radial nodes are uniform and one of them
/// sits exactly on r = a.
///
/// Each node j owns the radial cell [r_{j-1/2}, r_{j+1/2}] clipped to [0,R].
/// Cell volumes are exact shell volumes, so constants integrate exactly. The
/// interface cell is split at r = a into an inner and an outer part; the
/// face between nodes j and j+1 carries the shell area at r_{j+1/2}.
class SpaceTimeGrid {
public:
    SpaceTimeGrid(const RadialDomain& domain, double final_time, int time_steps,
                  int radial_cells);

    const RadialDomain& domain() const noexcept { return domain_; }
    double final_time() const noexcept { return final_time_; }
    int time_steps() const noexcept { return time_steps_; }
    int radial_cells() const noexcept { return radial_cells_; }
    int time_levels() const noexcept { return time_steps_ + 1; }
    int nodes() const noexcept { return radial_cells_ + 1; }
    int interface_index() const noexcept { return interface_index_; }
    double h() const noexcept { return h_; }
    double dt() const noexcept { return dt_; }

    double r(int j) const { return j * h_; }
    double t(int n) const { return n * dt_; }

    double cell_volume(int j) const { return cell_volume_[j]; }
    double inner_volume(int j) const { return inner_volume_[j]; }
    double outer_volume(int j) const { return cell_volume_[j] - inner_volume_[j]; }
    /// Shell area of the face between nodes j and j+1, j in [0, Nr).
    double face_area(int j) const { return face_area_[j]; }
    /// Trapezoidal weight of time level n.
    double time_weight(int n) const;

    std::span<const double> cell_volumes() const { return cell_volume_; }
    std::span<const double> inner_volumes() const { return inner_volume_; }
    std::span<const double> face_areas() const { return face_area_; }

    /// Same domain and horizon with Nr and Nt multiplied by integer factors;
    /// the interface stays a node.
    SpaceTimeGrid refined(int space_factor, int time_factor) const;

private:
    RadialDomain domain_;
    double final_time_;
    int time_steps_;
    int radial_cells_;
    int interface_index_;
    double h_;
    double dt_;
    std::vector<double> cell_volume_;
    std::vector<double> inner_volume_;
    std::vector<double> face_area_;
};

using GridPtr = std::shared_ptr<const SpaceTimeGrid>;

GridPtr make_grid(const RadialDomain& domain, double final_time, int time_steps,
                  int radial_cells);

enum class Region { FullBall, Annulus, InnerBall, LateralBoundary };

std::string_view to_string(Region region);

/// Scalar samples on a space-time grid, restricted to a region. Values are
/// stored row-major as (time level, node); node columns cover
/// [first_node, first_node + width). LateralBoundary fields have one column,
/// the interface node.
class Field {
public:
    Field(GridPtr grid, Region region, std::vector<double> values);

    static Field zeros(GridPtr grid, Region region);

    /// Samples f(t, r) at every (time level, node) of the region.
    template <class F>
    static Field sample(GridPtr grid, Region region, F&& f);

    const GridPtr& grid_ptr() const noexcept { return grid_; }
    const SpaceTimeGrid& grid() const noexcept { return *grid_; }
    Region region() const noexcept { return region_; }
    int levels() const noexcept { return grid_->time_levels(); }
    int width() const noexcept { return width_; }
    int first_node() const noexcept { return first_node_; }
    int last_node() const noexcept { return first_node_ + width_ - 1; }

    /// Value at time level n and global node index j.
    double at(int n, int j) const { return values_[index(n, j)]; }
    std::span<const double> level(int n) const
    {
        return {values_.data() + static_cast<std::size_t>(n) * width_,
                static_cast<std::size_t>(width_)};
    }
    std::span<const double> values() const noexcept { return values_; }

    double max_abs() const;

private:
    std::size_t index(int n, int j) const
    {
        return static_cast<std::size_t>(n) * width_ + (j - first_node_);
    }

    GridPtr grid_;
    Region region_;
    int first_node_;
    int width_;
    std::vector<double> values_;
};

/// Node range [first, first + width) covered by a region.
struct NodeRange {
    int first;
    int width;
};
NodeRange node_range(const SpaceTimeGrid& grid, Region region);

Field operator+(const Field& lhs, const Field& rhs);
Field operator-(const Field& lhs, const Field& rhs);
Field operator*(double scale, const Field& field);

/// E_0: extension by zero of an annulus field into the whole ball.
Field extend_by_zero(const Field& annulus_field);
/// R_1: restriction of a full-ball field to the annulus, interface included.
Field restrict_outer(const Field& full_field);
/// R_0: restriction of a full-ball field to the inner ball, interface included.
Field restrict_inner(const Field& full_field);
/// Time series at r = a.
Field lateral_trace(const Field& field);
/// u(t_n) -> u(t_{Nt-n}).
Field time_reversed(const Field& field);

template <class F>
Field Field::sample(GridPtr grid, Region region, F&& f)
{
    const auto range = node_range(*grid, region);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(grid->time_levels()) * range.width);
    for (int n = 0; n < grid->time_levels(); ++n) {
        for (int j = range.first; j < range.first + range.width; ++j) {
            values.push_back(f(grid->t(n), grid->r(j)));
        }
    }
    return Field(std::move(grid), region, std::move(values));
}

}  // namespace doismol
