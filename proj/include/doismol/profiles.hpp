#pragma once

#include "doismol/domain_grid.hpp"
#include "doismol/solvers.hpp"

namespace doismol {

/// C-infinity bump amplitude * exp(1 - 1/(1 - s^2)), s = (r - center) / half_width,
/// zero for |s| >= 1. The support must sit inside (a, R), so g(a) = 0 and
/// g'(R) = 0.
RadialFunction bump_profile(const RadialDomain& domain, double center, double half_width,
                            double amplitude = 1.0);

/// Default bump: centred in the annulus with 40% of its width as half width.
RadialFunction bump_profile(const RadialDomain& domain);

/// k-th Smoluchowski eigenfunction sin(beta_k (r - a)) / r (m = 3 only).
RadialFunction eigenmode_profile(const RadialDomain& domain, int k);

RadialFunction zero_profile();

}  // namespace doismol
