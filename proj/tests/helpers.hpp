#pragma once

#include "doismol/domain_grid.hpp"
#include "doismol/profiles.hpp"
#include "doismol/solvers.hpp"

#include <random>

namespace doismol::testing {

inline RadialDomain unit_domain()
{
    return RadialDomain(3, 1.0, 2.0);
}

inline GridPtr small_grid(int nr = 32, int nt = 64, double T = 0.5)
{
    return make_grid(unit_domain(), T, nt, nr);
}

inline ProblemSpec bump_spec(double lambda = 0.0, Scheme scheme = Scheme::CrankNicolson)
{
    ProblemSpec spec(unit_domain());
    spec.lambda = lambda;
    spec.initial = bump_profile(spec.domain);
    spec.scheme = scheme;
    return spec;
}

inline Field random_field(const GridPtr& grid, Region region, std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss;
    const auto range = node_range(*grid, region);
    std::vector<double> values(static_cast<std::size_t>(grid->time_levels()) * range.width);
    for (double& v : values) {
        v = gauss(rng);
    }
    return Field(grid, region, std::move(values));
}

}  // namespace doismol::testing
