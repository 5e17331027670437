#pragma once

#include "doismol/domain_grid.hpp"

#include <optional>
#include <span>

namespace doismol {

/// Space-time sets the norms integrate over: Q = I x Omega, Q0 = I x Omega_0,
/// Q1 = I x Omega_1 and the lateral interface Sigma0 = I x Gamma_0.
enum class NormRegion { Q, Q0, Q1, Sigma0 };

std::string_view to_string(NormRegion region);

// Spatial quadrature on one time level. `values` covers global nodes
// [first_node, first_node + values.size()); the nodes of `region` must lie
// inside that window. Interface cells contribute their inner half to Q0 and
// their outer half to Q1.
double spatial_l2_squared(const SpaceTimeGrid& grid, NormRegion region, int first_node,
                          std::span<const double> values);
// Face-centred differences weighted by the face shell area, the same
// weights the solvers' diffusion matrix uses.
double spatial_grad_squared(const SpaceTimeGrid& grid, NormRegion region, int first_node,
                            std::span<const double> values);

double slice_l2(const Field& field, int level, NormRegion region);
double slice_grad_l2(const Field& field, int level, NormRegion region);

/// L2(I; L2(region)) with trapezoidal weights in time.
double l2(const Field& field, NormRegion region);
double grad_l2(const Field& field, NormRegion region);
/// max_n ||u(t_n)||_{L2(region)}.
double sup_t_l2(const Field& field, NormRegion region);

/// Time-direction Slobodeckii seminorm of order mu in (0,1):
/// sum_{n != k} w_n w_k ||u(t_n) - u(t_k)||^2 / |t_n - t_k|^{1 + 2 mu},
/// square-rooted. The diagonal n = k is left out.
double slobodeckii_time(const Field& field, double mu, NormRegion region);

/// x0^{1-theta} x1^theta, the interpolation inequality with unit constant.
double interpolation_bound(double x0, double x1, double theta);

/// Surrogate for the anisotropic H^{r,s} norm:
/// sqrt(||u||^2 + (||u||^{1-r} ||grad u||^r)^2 + [u]_{s,time}^2).
/// The space-fractional seminorm is the interpolation product between L2 and
/// the H1 seminorm.
double hrs_surrogate(const Field& field, double space_order, double time_order,
                     NormRegion region);

enum class NormKind { L2, GradL2, SupTL2, SloboTime, Hrs };

/// Declarative norm request; see evaluate().
struct NormSpec {
    NormRegion region = NormRegion::Q;
    NormKind kind = NormKind::L2;
    /// Slobodeckii order, or the time order of Hrs.
    double mu = 0.5;
    /// Space order of Hrs.
    double r = 0.5;
    /// Restricts L2 / GradL2 to one time level.
    std::optional<int> time_level;
};

void validate(const NormSpec& spec);
double evaluate(const Field& field, const NormSpec& spec);

}  // namespace doismol
