#include "doismol/solvers.hpp"

#include "doismol/errors.hpp"
#include "doismol/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/core.h>

namespace doismol {

namespace {

// Semi-discrete system M u' = -S u - Lambda u + M f over a node window.
struct RadialSystem {
    int first = 0;
    int width = 0;
    bool dirichlet = false;     // local row 0 carries u = h
    std::vector<double> mass;
    std::vector<double> absorb;  // lambda * inner volume
    std::vector<double> coupling;  // kappa * face area / h, width - 1 entries
};

RadialSystem assemble(const SpaceTimeGrid& grid, double kappa, double lambda, Region region)
{
    RadialSystem sys;
    const auto range = node_range(grid, region);
    sys.first = range.first;
    sys.width = range.width;
    sys.dirichlet = region == Region::Annulus;
    sys.mass.resize(sys.width);
    sys.absorb.assign(sys.width, 0.0);
    sys.coupling.resize(sys.width - 1);
    for (int i = 0; i < sys.width; ++i) {
        const int j = sys.first + i;
        sys.mass[i] = region == Region::Annulus ? grid.outer_volume(j) : grid.cell_volume(j);
        if (region == Region::FullBall) {
            sys.absorb[i] = lambda * grid.inner_volume(j);
        }
    }
    for (int i = 0; i + 1 < sys.width; ++i) {
        sys.coupling[i] = kappa * grid.face_area(sys.first + i) / grid.h();
    }
    return sys;
}

void diffuse(const RadialSystem& sys, std::span<const double> u, std::span<double> out)
{
    for (int i = 0; i < sys.width; ++i) {
        double acc = 0.0;
        if (i > 0) {
            acc += sys.coupling[i - 1] * (u[i] - u[i - 1]);
        }
        if (i + 1 < sys.width) {
            acc += sys.coupling[i] * (u[i] - u[i + 1]);
        }
        out[i] = acc;
    }
}

// theta-step for diffusion, absorption always implicit:
// (M + theta tau S + tau Lambda) b = (M - (1-theta) tau S) a + tau M f_mid
class Stepper {
public:
    explicit Stepper(const RadialSystem& sys) : sys_(sys), scratch_(sys.width), rhs_(sys.width) {}

    void step(double theta, double tau, std::span<const double> prev,
              std::span<const double> source, double dirichlet_value, std::span<double> next)
    {
        const auto& solver = factorization(theta, tau);
        diffuse(sys_, prev, scratch_);
        for (int i = 0; i < sys_.width; ++i) {
            rhs_[i] = sys_.mass[i] * prev[i] - (1.0 - theta) * tau * scratch_[i];
            if (!source.empty()) {
                rhs_[i] += tau * sys_.mass[i] * source[i];
            }
        }
        if (sys_.dirichlet) {
            rhs_[0] = dirichlet_value;
        }
        solver.solve(rhs_, next);
    }

private:
    const TridiagonalSolver& factorization(double theta, double tau)
    {
        const auto key = std::make_pair(theta, tau);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            return it->second;
        }
        const int n = sys_.width;
        std::vector<double> lower(n, 0.0), diag(n), upper(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double off = 0.0;
            if (i > 0) {
                lower[i] = -theta * tau * sys_.coupling[i - 1];
                off += sys_.coupling[i - 1];
            }
            if (i + 1 < n) {
                upper[i] = -theta * tau * sys_.coupling[i];
                off += sys_.coupling[i];
            }
            diag[i] = sys_.mass[i] + theta * tau * off + tau * sys_.absorb[i];
        }
        if (sys_.dirichlet) {
            diag[0] = 1.0;
            upper[0] = 0.0;
        }
        return cache_.emplace(key, TridiagonalSolver(lower, diag, upper)).first->second;
    }

    const RadialSystem& sys_;
    std::vector<double> scratch_;
    std::vector<double> rhs_;
    std::map<std::pair<double, double>, TridiagonalSolver> cache_;
};

void require_finite(std::span<const double> values, int level)
{
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw SolverError("non-finite value during time stepping", level);
        }
    }
}

void require_field(const Field& field, const GridPtr& grid, Region region, const char* what)
{
    if (field.region() != region) {
        throw ValidationError(fmt::format("{} must be a {} field, got {}", what,
                                          to_string(region), to_string(field.region())));
    }
    if (field.levels() != grid->time_levels() || !(field.grid().domain() == grid->domain())
        || field.grid().nodes() != grid->nodes()) {
        throw ValidationError(fmt::format("{} lives on a different grid", what));
    }
}

struct RunInput {
    Region region;
    double lambda;
    std::vector<double> initial;
    const Field* forcing = nullptr;
    const Field* boundary = nullptr;
    // Smoluchowski: every level after t = 0 has u(a) = 0 even when g(a) != 0.
    bool homogeneous_dirichlet = false;
    double interface_jump = 0.0;
};

Field run(const ProblemSpec& spec, const GridPtr& grid, const RunInput& in)
{
    const auto sys = assemble(*grid, spec.kappa, in.lambda, in.region);
    const int width = sys.width;
    const int levels = grid->time_levels();
    const double dt = grid->dt();

    std::vector<double> values(static_cast<std::size_t>(levels) * width);
    std::copy(in.initial.begin(), in.initial.end(), values.begin());

    auto level = [&](int n) {
        return std::span<double>(values.data() + static_cast<std::size_t>(n) * width,
                                 static_cast<std::size_t>(width));
    };
    auto boundary_at = [&](int n) {
        return in.boundary ? in.boundary->at(n, grid->interface_index()) : 0.0;
    };

    const bool smoothing = startup_smoothing_active(spec, in.interface_jump);
    const double theta = spec.scheme == Scheme::CrankNicolson ? 0.5 : 1.0;

    Stepper stepper(sys);
    std::vector<double> source(in.forcing ? width : 0);
    std::vector<double> half(width);

    // Linear-in-time blend of the forcing between levels n and n+1.
    auto blend_source = [&](int n, double w_next) {
        if (!in.forcing) {
            return;
        }
        const auto a = in.forcing->level(n);
        const auto b = in.forcing->level(n + 1);
        for (int i = 0; i < width; ++i) {
            source[i] = (1.0 - w_next) * a[i] + w_next * b[i];
        }
    };

    for (int n = 0; n + 1 < levels; ++n) {
        const double h_next = boundary_at(n + 1);
        if (n == 0 && smoothing) {
            const double h_half = 0.5 * (boundary_at(0) + h_next);
            blend_source(0, 0.5);
            stepper.step(1.0, 0.5 * dt, level(0), source, h_half, half);
            blend_source(0, 1.0);
            stepper.step(1.0, 0.5 * dt, half, source, h_next, level(1));
        } else {
            blend_source(n, theta);
            stepper.step(theta, dt, level(n), source, h_next, level(n + 1));
        }
        if (in.homogeneous_dirichlet) {
            level(n + 1)[0] = 0.0;
        }
        require_finite(level(n + 1), n + 1);
    }
    return Field(grid, in.region, std::move(values));
}

std::vector<double> sample_initial(const ProblemSpec& spec, const SpaceTimeGrid& grid,
                                   Region region, bool extend_by_zero)
{
    const auto range = node_range(grid, region);
    std::vector<double> u(range.width, 0.0);
    for (int i = 0; i < range.width; ++i) {
        const int j = range.first + i;
        if (extend_by_zero && j < grid.interface_index()) {
            continue;
        }
        u[i] = spec.initial ? spec.initial(grid.r(j)) : 0.0;
        if (!std::isfinite(u[i])) {
            throw ValidationError(fmt::format("initial datum is not finite at r = {}", grid.r(j)));
        }
    }
    return u;
}

}  // namespace

void validate(const ProblemSpec& spec, const SpaceTimeGrid& grid)
{
    if (!(spec.kappa > 0.0) || !std::isfinite(spec.kappa)) {
        throw ValidationError(fmt::format("kappa must be > 0, got {}", spec.kappa));
    }
    if (!(spec.lambda >= 0.0) || !std::isfinite(spec.lambda)) {
        throw ValidationError(fmt::format("lambda must be >= 0, got {}", spec.lambda));
    }
    if (!(spec.domain == grid.domain())) {
        throw ValidationError("problem domain does not match the grid domain");
    }
}

bool startup_smoothing_active(const ProblemSpec& spec, double interface_jump)
{
    if (spec.scheme != Scheme::CrankNicolson) {
        return false;
    }
    switch (spec.startup) {
    case StartupSmoothing::On: return true;
    case StartupSmoothing::Off: return false;
    case StartupSmoothing::Auto: return interface_jump != 0.0;
    }
    return false;
}

void apply_diffusion(const SpaceTimeGrid& grid, double kappa, int first,
                     std::span<const double> values, std::span<double> out)
{
    const int width = static_cast<int>(values.size());
    for (int i = 0; i < width; ++i) {
        const int j = first + i;
        double acc = 0.0;
        if (i > 0) {
            acc += kappa * grid.face_area(j - 1) / grid.h() * (values[i] - values[i - 1]);
        }
        if (i + 1 < width) {
            acc += kappa * grid.face_area(j) / grid.h() * (values[i] - values[i + 1]);
        }
        out[i] = acc;
    }
}

Field solve_doi(const ProblemSpec& spec, const GridPtr& grid)
{
    validate(spec, *grid);
    ProblemSpec homogeneous = spec;
    homogeneous.forcing.reset();
    homogeneous.boundary_data.reset();
    RunInput in{Region::FullBall, spec.lambda,
                sample_initial(spec, *grid, Region::FullBall, true)};
    in.interface_jump = std::abs(in.initial[grid->interface_index()]);
    return run(homogeneous, grid, in);
}

Field solve_smoluchowski(const ProblemSpec& spec, const GridPtr& grid)
{
    validate(spec, *grid);
    ProblemSpec homogeneous = spec;
    homogeneous.forcing.reset();
    homogeneous.boundary_data.reset();
    RunInput in{Region::Annulus, 0.0, sample_initial(spec, *grid, Region::Annulus, false)};
    in.homogeneous_dirichlet = true;
    in.interface_jump = std::abs(in.initial[0]);
    return run(homogeneous, grid, in);
}

Field solve_forced(const ProblemSpec& spec, const GridPtr& grid, bool dirichlet_inner)
{
    validate(spec, *grid);
    const Region region = dirichlet_inner ? Region::Annulus : Region::FullBall;
    RunInput in{region, dirichlet_inner ? 0.0 : spec.lambda,
                sample_initial(spec, *grid, region, false)};
    if (spec.forcing) {
        require_field(*spec.forcing, grid, region, "forcing");
        in.forcing = &*spec.forcing;
    }
    if (spec.boundary_data) {
        if (!dirichlet_inner) {
            throw ValidationError("boundary_data requires the Dirichlet (annulus) problem");
        }
        require_field(*spec.boundary_data, grid, Region::LateralBoundary, "boundary_data");
        in.boundary = &*spec.boundary_data;
    }
    if (dirichlet_inner) {
        const double h0 = in.boundary ? in.boundary->at(0, grid->interface_index()) : 0.0;
        in.interface_jump = std::abs(in.initial[0] - h0);
    }
    return run(spec, grid, in);
}

Field solve_auxiliary(const Field& v, const ProblemSpec& spec, const GridPtr& grid)
{
    require_field(v, grid, Region::Annulus, "auxiliary datum v");
    ProblemSpec reversed = spec;
    reversed.initial = nullptr;
    reversed.boundary_data.reset();
    reversed.forcing = time_reversed(v);
    return time_reversed(solve_forced(reversed, grid, true));
}

CouplingResiduals coupling_residuals(const Field& p)
{
    if (p.region() != Region::FullBall) {
        throw ValidationError("coupling_residuals expects a FullBall field");
    }
    const auto& grid = p.grid();
    const int j0 = grid.interface_index();
    const double h = grid.h();
    CouplingResiduals out;
    double grad_scale = 0.0;
    double worst = 0.0;
    for (int n = 0; n < p.levels(); ++n) {
        for (int j = 0; j + 1 < grid.nodes(); ++j) {
            grad_scale = std::max(grad_scale, std::abs(p.at(n, j + 1) - p.at(n, j)) / h);
        }
        const double inner = (3.0 * p.at(n, j0) - 4.0 * p.at(n, j0 - 1) + p.at(n, j0 - 2))
                             / (2.0 * h);
        const double outer = (-3.0 * p.at(n, j0) + 4.0 * p.at(n, j0 + 1) - p.at(n, j0 + 2))
                             / (2.0 * h);
        worst = std::max(worst, std::abs(inner - outer));
    }
    // Both one-sided restrictions read the same interface node.
    out.value_jump = 0.0;
    out.flux_jump = grad_scale > 0.0 ? worst / grad_scale : 0.0;
    return out;
}

}  // namespace doismol
