#include "doismol/rates.hpp"

#include "doismol/errors.hpp"
#include "doismol/estimates.hpp"
#include "doismol/norms.hpp"
#include "doismol/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/core.h>

namespace doismol {

namespace {

struct Name {
    const char* text;
    QuantityKind kind;
    bool parametrized;
};

constexpr Name kNames[] = {
    {"interior_l2q0", QuantityKind::InteriorL2Q0, false},
    {"interior_supt_l2", QuantityKind::InteriorSupTL2, false},
    {"trace_l2sigma0", QuantityKind::TraceL2Sigma0, false},
    {"exterior_error_l2q1", QuantityKind::ExteriorErrorL2Q1, false},
    {"frac_interior", QuantityKind::FracInterior, true},
    {"frac_exterior", QuantityKind::FracExterior, true},
    {"main_bound_ratio", QuantityKind::MainBoundRatio, false},
};

double parse_order(const std::string& text, const std::string& whole)
{
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw ValidationError(fmt::format("bad order '{}' in quantity '{}'", text, whole));
    }
    if (!(value > 0.0 && value < 1.0)) {
        throw ValidationError(
            fmt::format("orders in '{}' must lie strictly inside (0,1)", whole));
    }
    return value;
}

double evaluate(const Quantity& q, const Field& p, const std::optional<Field>& error)
{
    switch (q.kind) {
    case QuantityKind::InteriorL2Q0: return l2(p, NormRegion::Q0);
    case QuantityKind::InteriorSupTL2: return sup_t_l2(p, NormRegion::Q0);
    case QuantityKind::TraceL2Sigma0: return l2(lateral_trace(p), NormRegion::Sigma0);
    case QuantityKind::ExteriorErrorL2Q1: return l2(*error, NormRegion::Q1);
    case QuantityKind::FracInterior:
        return hrs_surrogate(restrict_inner(p), q.first_order, q.second_order, NormRegion::Q0);
    case QuantityKind::FracExterior:
        return hrs_surrogate(*error, q.first_order, q.second_order, NormRegion::Q1);
    case QuantityKind::MainBoundRatio: return main_bound_ratio(*error, lateral_trace(p));
    }
    return 0.0;
}

}  // namespace

Quantity Quantity::parse(const std::string& text)
{
    const auto open = text.find('(');
    const std::string head = text.substr(0, open);
    for (const auto& entry : kNames) {
        if (head != entry.text) {
            continue;
        }
        Quantity q;
        q.kind = entry.kind;
        if (!entry.parametrized) {
            if (open != std::string::npos) {
                throw ValidationError(fmt::format("quantity '{}' takes no orders", head));
            }
            return q;
        }
        const auto comma = text.find(',', open);
        if (open == std::string::npos || comma == std::string::npos || text.back() != ')') {
            throw ValidationError(
                fmt::format("quantity '{}' needs two orders, e.g. {}(0.6,0.6)", text, head));
        }
        q.first_order = parse_order(text.substr(open + 1, comma - open - 1), text);
        q.second_order = parse_order(text.substr(comma + 1, text.size() - comma - 2), text);
        return q;
    }
    throw ValidationError(fmt::format("unknown quantity '{}'", text));
}

std::string Quantity::name() const
{
    for (const auto& entry : kNames) {
        if (entry.kind == kind) {
            return entry.parametrized
                       ? fmt::format("{}({},{})", entry.text, first_order, second_order)
                       : std::string(entry.text);
        }
    }
    return "?";
}

double Quantity::claimed_exponent() const
{
    switch (kind) {
    case QuantityKind::InteriorL2Q0:
    case QuantityKind::InteriorSupTL2: return 0.5;
    case QuantityKind::TraceL2Sigma0:
    case QuantityKind::ExteriorErrorL2Q1: return 0.25;
    case QuantityKind::FracInterior:
        return std::min((1.0 - first_order) / 2.0, (1.0 - second_order) / 2.0);
    case QuantityKind::FracExterior:
        return std::min((1.0 - first_order) / 4.0, (1.0 - second_order) / 4.0);
    case QuantityKind::MainBoundRatio: return 0.0;
    }
    return 0.0;
}

bool Quantity::exterior() const
{
    return kind == QuantityKind::ExteriorErrorL2Q1 || kind == QuantityKind::FracExterior
           || kind == QuantityKind::MainBoundRatio;
}

std::vector<double> geometric_lambdas(double lo, double hi, int count)
{
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
        throw ValidationError(fmt::format("lambda range needs 0 < min < max, got [{}, {}]", lo, hi));
    }
    if (count < 2) {
        throw ValidationError(fmt::format("lambda count must be >= 2, got {}", count));
    }
    std::vector<double> out(count);
    const double step = std::log10(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) {
        out[i] = lo * std::pow(10.0, step * i);
    }
    out.back() = hi;
    return out;
}

void validate(const SweepSpec& spec)
{
    if (spec.lambdas.size() < 4) {
        throw ValidationError(
            fmt::format("a sweep needs at least 4 lambda values, got {}", spec.lambdas.size()));
    }
    for (std::size_t i = 0; i < spec.lambdas.size(); ++i) {
        if (!(spec.lambdas[i] > 0.0) || !std::isfinite(spec.lambdas[i])) {
            throw ValidationError(fmt::format("lambda must be > 0, got {}", spec.lambdas[i]));
        }
        if (i > 0 && !(spec.lambdas[i] > spec.lambdas[i - 1])) {
            throw ValidationError("lambda values must be strictly increasing");
        }
    }
    if (spec.quantities.empty()) {
        throw ValidationError("a sweep needs at least one quantity");
    }
    if (!spec.grid) {
        throw ValidationError("sweep has no grid");
    }
    if (spec.jobs < 1) {
        throw ValidationError(fmt::format("jobs must be >= 1, got {}", spec.jobs));
    }
    validate(spec.problem, *spec.grid);
}

SweepResult run_sweep(const SweepSpec& spec)
{
    validate(spec);
    const bool need_exterior = std::any_of(spec.quantities.begin(), spec.quantities.end(),
                                           [](const Quantity& q) { return q.exterior(); });
    SweepResult result;
    std::optional<Field> rho;
    if (need_exterior) {
        rho = solve_smoluchowski(spec.problem, spec.grid);
        if (spec.grid->domain().dimension() == 3 && spec.problem.initial) {
            const auto series = series_solution(spec.problem.initial, spec.problem.kappa, spec.grid);
            result.discretization_floor = l2(*rho - series, NormRegion::Q1);
        }
    }

    const std::size_t count = spec.lambdas.size();
    std::vector<std::vector<double>> values(count);
    std::vector<std::exception_ptr> failures(count);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            const double lambda = spec.lambdas[i];
            try {
                ProblemSpec problem = spec.problem;
                problem.lambda = lambda;
                const Field p = solve_doi(problem, spec.grid);
                std::optional<Field> error;
                if (need_exterior) {
                    error = restrict_outer(p) - *rho;
                }
                for (const auto& q : spec.quantities) {
                    values[i].push_back(evaluate(q, p, error));
                }
            } catch (const SolverError& e) {
                failures[i] = std::make_exception_ptr(SolverError(
                    fmt::format("lambda = {}: {}", lambda, e.what()), e.time_level()));
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    const int threads = std::min<int>(spec.jobs, static_cast<int>(count));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < threads; ++k) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t k = 0; k < spec.quantities.size(); ++k) {
            result.rows.push_back({spec.lambdas[i], spec.quantities[k].name(), values[i][k]});
        }
    }
    return result;
}

RateFit fit_rate(const std::vector<SweepRow>& rows, const std::string& quantity, double floor)
{
    const Quantity q = Quantity::parse(quantity);
    RateFit fit;
    fit.quantity = q.name();
    fit.claimed_exponent = q.claimed_exponent();

    std::vector<double> xs, ys, lambdas, vals;
    for (const auto& row : rows) {
        if (row.quantity != fit.quantity) {
            continue;
        }
        if (!(row.value > 0.0) || !std::isfinite(row.value) || !(row.lambda > 0.0)) {
            throw DegenerateError(fmt::format("{} has a non-positive value {} at lambda = {}",
                                              fit.quantity, row.value, row.lambda));
        }
        if (q.kind != QuantityKind::MainBoundRatio && q.exterior() && floor > 0.0
            && row.value < 3.0 * floor) {
            ++fit.points_dropped;
            continue;
        }
        lambdas.push_back(row.lambda);
        vals.push_back(row.value);
        xs.push_back(std::log(row.lambda));
        ys.push_back(std::log(row.value));
    }
    fit.points_used = static_cast<int>(xs.size());
    if (fit.points_used < 2) {
        throw DegenerateError(fmt::format("{}: {} usable points, need at least 2", fit.quantity,
                                          fit.points_used));
    }

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / n;
        my += ys[i] / n;
    }
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) {
        throw DegenerateError(fmt::format("{}: all points share one lambda", fit.quantity));
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;

    std::vector<double> margin(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        margin[i] = vals[i] * std::pow(lambdas[i], fit.claimed_exponent);
    }
    fit.bound_margin = *std::max_element(margin.begin(), margin.end());
    fit.margin_nonincreasing = std::isfinite(fit.bound_margin);
    for (std::size_t i = margin.size() / 2 + 1; i < margin.size(); ++i) {
        if (margin[i] > margin[i - 1] * (1.0 + 1e-9)) {
            fit.margin_nonincreasing = false;
        }
    }
    return fit;
}

std::vector<ClaimVerdict> check_claims(const std::vector<RateFit>& fits)
{
    std::vector<ClaimVerdict> out;
    for (const auto& fit : fits) {
        ClaimVerdict v;
        v.quantity = fit.quantity;
        v.slope = fit.slope;
        v.claimed_exponent = fit.claimed_exponent;
        v.bound_margin = fit.bound_margin;
        v.margin_nonincreasing = fit.margin_nonincreasing;
        v.pass = fit.slope <= -fit.claimed_exponent + 0.05
                 || (std::isfinite(fit.bound_margin) && fit.margin_nonincreasing);
        out.push_back(v);
    }
    return out;
}

}  // namespace doismol
