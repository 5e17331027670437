#include "doismol/profiles.hpp"

#include "doismol/errors.hpp"
#include "doismol/oracle.hpp"

#include <cmath>

#include <fmt/core.h>

namespace doismol {

RadialFunction bump_profile(const RadialDomain& domain, double center, double half_width,
                            double amplitude)
{
    if (!(half_width > 0.0)) {
        throw ValidationError(fmt::format("bump half width must be > 0, got {}", half_width));
    }
    if (!(center - half_width >= domain.inner_radius()
          && center + half_width <= domain.outer_radius())) {
        throw ValidationError(fmt::format("bump support [{}, {}] must lie inside [a, R] = [{}, {}]",
                                          center - half_width, center + half_width,
                                          domain.inner_radius(), domain.outer_radius()));
    }
    return [=](double r) {
        const double s = (r - center) / half_width;
        if (std::abs(s) >= 1.0) {
            return 0.0;
        }
        return amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
    };
}

RadialFunction bump_profile(const RadialDomain& domain)
{
    const double a = domain.inner_radius();
    const double R = domain.outer_radius();
    return bump_profile(domain, 0.5 * (a + R), 0.4 * (R - a));
}

RadialFunction eigenmode_profile(const RadialDomain& domain, int k)
{
    if (k < 1) {
        throw ValidationError(fmt::format("eigenmode index must be >= 1, got {}", k));
    }
    const double beta = eigen_wavenumbers(domain, k).back();
    const double a = domain.inner_radius();
    return [=](double r) { return std::sin(beta * (r - a)) / r; };
}

RadialFunction zero_profile()
{
    return [](double) { return 0.0; };
}

}  // namespace doismol
