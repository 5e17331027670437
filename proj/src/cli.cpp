#include "doismol/cli.hpp"

#include "doismol/errors.hpp"
#include "doismol/estimates.hpp"
#include "doismol/norms.hpp"
#include "doismol/oracle.hpp"
#include "doismol/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "json.hpp"

namespace doismol {

using nlohmann::json;

namespace {

// ---- config parsing ------------------------------------------------------

const json& section(const json& root, const char* name)
{
    static const json empty = json::object();
    if (!root.contains(name)) {
        return empty;
    }
    const json& s = root.at(name);
    if (!s.is_object()) {
        throw ValidationError(fmt::format("config key '{}' must be an object", name));
    }
    return s;
}

void reject_unknown(const json& object, const std::string& prefix,
                    std::initializer_list<const char*> allowed)
{
    for (const auto& [key, value] : object.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* name) { return key == name; });
        if (!known) {
            throw ValidationError(fmt::format("unknown config key '{}{}'", prefix, key));
        }
    }
}

void read(const json& s, const std::string& prefix, const char* key, double& out)
{
    if (!s.contains(key)) {
        return;
    }
    const auto& v = s.at(key);
    if (!v.is_number()) {
        throw ValidationError(fmt::format("config key '{}{}' must be a number", prefix, key));
    }
    out = v.get<double>();
}

void read(const json& s, const std::string& prefix, const char* key, std::optional<double>& out)
{
    if (s.contains(key)) {
        double value = 0.0;
        read(s, prefix, key, value);
        out = value;
    }
}

void read(const json& s, const std::string& prefix, const char* key, int& out)
{
    if (!s.contains(key)) {
        return;
    }
    const auto& v = s.at(key);
    if (!v.is_number_integer()) {
        throw ValidationError(fmt::format("config key '{}{}' must be an integer", prefix, key));
    }
    const auto wide = v.get<long long>();
    if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) {
        throw ValidationError(fmt::format("config key '{}{}' is out of range", prefix, key));
    }
    out = static_cast<int>(wide);
}

void read(const json& s, const std::string& prefix, const char* key, std::string& out)
{
    if (!s.contains(key)) {
        return;
    }
    const auto& v = s.at(key);
    if (!v.is_string()) {
        throw ValidationError(fmt::format("config key '{}{}' must be a string", prefix, key));
    }
    out = v.get<std::string>();
}

void read(const json& s, const std::string& prefix, const char* key, bool& out)
{
    if (!s.contains(key)) {
        return;
    }
    const auto& v = s.at(key);
    if (!v.is_boolean()) {
        throw ValidationError(fmt::format("config key '{}{}' must be true or false", prefix, key));
    }
    out = v.get<bool>();
}

void read(const json& s, const std::string& prefix, const char* key,
          std::vector<std::string>& out)
{
    if (!s.contains(key)) {
        return;
    }
    const auto& v = s.at(key);
    if (!v.is_array()) {
        throw ValidationError(fmt::format("config key '{}{}' must be a list", prefix, key));
    }
    out.clear();
    for (const auto& item : v) {
        if (!item.is_string()) {
            throw ValidationError(
                fmt::format("config key '{}{}' must list strings", prefix, key));
        }
        out.push_back(item.get<std::string>());
    }
}

std::optional<int> eigenmode_index(const std::string& profile)
{
    constexpr std::string_view head = "eigenmode(";
    if (profile.rfind(head, 0) != 0 || profile.back() != ')') {
        return std::nullopt;
    }
    const std::string digits = profile.substr(head.size(), profile.size() - head.size() - 1);
    if (digits.empty() || digits.size() > 6
        || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
    }
    return std::stoi(digits);
}

Scheme scheme_of(const std::string& name)
{
    if (name == "cn") {
        return Scheme::CrankNicolson;
    }
    if (name == "be") {
        return Scheme::BackwardEuler;
    }
    throw ValidationError(fmt::format("config key 'grid.scheme' must be 'be' or 'cn', got '{}'", name));
}

StartupSmoothing startup_of(const std::string& name)
{
    if (name == "auto") {
        return StartupSmoothing::Auto;
    }
    if (name == "on") {
        return StartupSmoothing::On;
    }
    if (name == "off") {
        return StartupSmoothing::Off;
    }
    throw ValidationError(
        fmt::format("config key 'grid.startup' must be 'auto', 'on' or 'off', got '{}'", name));
}

// ---- output helpers ------------------------------------------------------

std::string number(double x)
{
    return fmt::format("{:.17g}", x);
}

std::filesystem::path prepare_dir(const RunConfig& config)
{
    std::filesystem::path dir(config.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw ValidationError(
            fmt::format("config key 'output.directory': cannot create '{}': {}", config.out_dir,
                        ec.message()));
    }
    return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ValidationError(fmt::format("cannot write '{}'", path.string()));
    }
    out << text;
}

bool wants(const RunConfig& config, const char* format)
{
    return std::find(config.formats.begin(), config.formats.end(), format) != config.formats.end();
}

void write_config(const std::filesystem::path& dir, const RunConfig& config)
{
    write_file(dir / "config.json", dump_config(config));
}

std::string snapshot_csv(const Field& field, const std::string& hash)
{
    std::string out = "t,r,value\n";
    const auto& grid = field.grid();
    const int steps = grid.time_steps();
    std::set<int> levels;
    for (int k = 0; k <= 4; ++k) {
        levels.insert(k * steps / 4);
    }
    for (int n : levels) {
        for (int j = field.first_node(); j <= field.last_node(); ++j) {
            out += fmt::format("{},{},{}\n", number(grid.t(n)), number(grid.r(j)),
                               number(field.at(n, j)));
        }
    }
    out += fmt::format("# config_hash={}\n", hash);
    return out;
}

json report_json(const EnergyReport& r)
{
    json terms = json::object();
    for (const auto& t : r.lhs_terms) {
        terms[t.name] = t.value;
    }
    return {
        {"identity", r.identity},
        {"lhs_terms", terms},
        {"lhs_sum", r.lhs_sum()},
        {"rhs", r.rhs},
        {"residual", r.residual},
        {"scheme_dissipation", r.scheme_dissipation},
        {"closure_residual", r.closure_residual},
        {"degenerate", r.degenerate},
        {"flags", r.flags},
        {"constants",
         {{"K1", r.constants.K1},
          {"K2", r.constants.K2},
          {"C1", r.constants.C1},
          {"C2", r.constants.C2},
          {"C3", r.constants.C3}}},
    };
}

double energy_value(const EnergyReport& r)
{
    return r.degenerate ? 0.0 : r.closure_residual;
}

VerifyCheck below(std::string name, double value, double threshold, std::string note = {})
{
    return {std::move(name), value, threshold, value <= threshold, std::move(note)};
}

VerifyCheck above(std::string name, double value, double threshold, std::string note = {})
{
    return {std::move(name), value, threshold, value >= threshold, std::move(note)};
}

std::string degenerate_note(const EnergyReport& r)
{
    return r.degenerate ? "degenerate" : "";
}

// Smooth random test field sum c_ij cos(i pi t / T) cos(j pi (r - a) / (R - a)).
Field random_annulus_field(const GridPtr& grid, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> coefficient(-1.0, 1.0);
    double c[3][3];
    for (auto& row : c) {
        for (double& x : row) {
            x = coefficient(rng);
        }
    }
    const double a = grid->domain().inner_radius();
    const double width = grid->domain().outer_radius() - a;
    const double horizon = grid->final_time();
    return Field::sample(grid, Region::Annulus, [&](double t, double r) {
        double sum = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                sum += c[i][j] * std::cos(i * M_PI * t / horizon)
                       * std::cos(j * M_PI * (r - a) / width);
            }
        }
        return sum;
    });
}

std::vector<double> trace_eps_list()
{
    std::vector<double> eps;
    for (int k = 8; k >= 0; --k) {
        eps.push_back(std::ldexp(1.0, -k));
    }
    return eps;
}

}  // namespace

// ---- config --------------------------------------------------------------

RunConfig resolve(RunConfig c)
{
    if (c.m < 1) {
        throw ValidationError(fmt::format("config key 'geometry.m' must be >= 1, got {}", c.m));
    }
    if (!(c.a > 0.0)) {
        throw ValidationError(fmt::format("config key 'geometry.a' must be > 0, got {}", c.a));
    }
    if (!(c.R > c.a) || !std::isfinite(c.R)) {
        throw ValidationError(fmt::format("config key 'geometry.R' must exceed a, got {}", c.R));
    }
    if (!(c.kappa > 0.0) || !std::isfinite(c.kappa)) {
        throw ValidationError(fmt::format("config key 'physics.kappa' must be > 0, got {}", c.kappa));
    }
    if (!(c.T > 0.0) || !std::isfinite(c.T)) {
        throw ValidationError(fmt::format("config key 'physics.T' must be > 0, got {}", c.T));
    }
    if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) {
        throw ValidationError(
            fmt::format("config key 'physics.lambda' must be >= 0, got {}", c.lambda));
    }
    if (c.Nr < 4) {
        throw ValidationError(fmt::format("config key 'grid.Nr' must be >= 4, got {}", c.Nr));
    }
    if (c.Nt < 1) {
        throw ValidationError(fmt::format("config key 'grid.Nt' must be >= 1, got {}", c.Nt));
    }
    scheme_of(c.scheme);
    startup_of(c.startup);

    if (c.profile == "bump") {
        if (!c.bump_center) {
            c.bump_center = 0.5 * (c.a + c.R);
        }
        if (!c.bump_half_width) {
            c.bump_half_width = 0.4 * (c.R - c.a);
        }
        if (!(*c.bump_half_width > 0.0) || *c.bump_center - *c.bump_half_width < c.a
            || *c.bump_center + *c.bump_half_width > c.R) {
            throw ValidationError("config key 'initial.center'/'initial.half_width': bump support "
                                  "must lie inside [a, R]");
        }
    } else if (c.profile == "zero") {
        c.bump_center.reset();
        c.bump_half_width.reset();
    } else if (auto k = eigenmode_index(c.profile)) {
        if (*k < 1) {
            throw ValidationError("config key 'initial.profile': eigenmode index must be >= 1");
        }
        if (c.m != 3) {
            throw ValidationError("config key 'initial.profile': eigenmode profiles need m = 3");
        }
        c.bump_center.reset();
        c.bump_half_width.reset();
    } else {
        throw ValidationError(fmt::format(
            "config key 'initial.profile' must be 'bump', 'eigenmode(k)' or 'zero', got '{}'",
            c.profile));
    }

    if (!(c.lambda_min > 0.0) || !(c.lambda_max > c.lambda_min) || !std::isfinite(c.lambda_max)) {
        throw ValidationError("config keys 'sweep.lambda_min'/'sweep.lambda_max' need 0 < min < max");
    }
    if (c.lambda_count < 4) {
        throw ValidationError(
            fmt::format("config key 'sweep.lambda_count' must be >= 4, got {}", c.lambda_count));
    }
    for (const auto& q : c.quantities) {
        try {
            Quantity::parse(q);
        } catch (const ValidationError& e) {
            throw ValidationError(fmt::format("config key 'sweep.quantities': {}", e.what()));
        }
    }
    if (c.quantities.empty()) {
        throw ValidationError("config key 'sweep.quantities' must not be empty");
    }
    for (const auto& f : c.formats) {
        if (f != "csv" && f != "json") {
            throw ValidationError(
                fmt::format("config key 'output.formats' allows 'csv' and 'json', got '{}'", f));
        }
    }
    if (c.out_dir.empty()) {
        throw ValidationError("config key 'output.directory' must not be empty");
    }
    // Grid alignment and the two-cells-per-side rule.
    try {
        SpaceTimeGrid(RadialDomain(c.m, c.a, c.R), c.T, c.Nt, c.Nr);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("config key 'grid.Nr': {}", e.what()));
    }
    return c;
}

RunConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(fmt::format("config is not valid JSON: {}", e.what()));
    }
    if (!root.is_object()) {
        throw ValidationError("config must be a JSON object");
    }
    reject_unknown(root, "",
                   {"geometry", "physics", "initial", "grid", "sweep", "output", "seed"});
    RunConfig c;

    const auto& geometry = section(root, "geometry");
    reject_unknown(geometry, "geometry.", {"m", "a", "R"});
    read(geometry, "geometry.", "m", c.m);
    read(geometry, "geometry.", "a", c.a);
    read(geometry, "geometry.", "R", c.R);

    const auto& physics = section(root, "physics");
    reject_unknown(physics, "physics.", {"kappa", "T", "lambda"});
    read(physics, "physics.", "kappa", c.kappa);
    read(physics, "physics.", "T", c.T);
    read(physics, "physics.", "lambda", c.lambda);

    const auto& initial = section(root, "initial");
    reject_unknown(initial, "initial.", {"profile", "center", "half_width", "amplitude"});
    read(initial, "initial.", "profile", c.profile);
    read(initial, "initial.", "center", c.bump_center);
    read(initial, "initial.", "half_width", c.bump_half_width);
    read(initial, "initial.", "amplitude", c.bump_amplitude);

    const auto& grid = section(root, "grid");
    reject_unknown(grid, "grid.", {"Nr", "Nt", "scheme", "startup"});
    read(grid, "grid.", "Nr", c.Nr);
    read(grid, "grid.", "Nt", c.Nt);
    read(grid, "grid.", "scheme", c.scheme);
    read(grid, "grid.", "startup", c.startup);

    const auto& sweep = section(root, "sweep");
    reject_unknown(sweep, "sweep.", {"lambda_min", "lambda_max", "lambda_count", "quantities"});
    read(sweep, "sweep.", "lambda_min", c.lambda_min);
    read(sweep, "sweep.", "lambda_max", c.lambda_max);
    read(sweep, "sweep.", "lambda_count", c.lambda_count);
    read(sweep, "sweep.", "quantities", c.quantities);

    const auto& output = section(root, "output");
    reject_unknown(output, "output.", {"directory", "formats", "snapshots"});
    read(output, "output.", "directory", c.out_dir);
    read(output, "output.", "formats", c.formats);
    read(output, "output.", "snapshots", c.snapshots);

    if (root.contains("seed")) {
        const auto& seed = root.at("seed");
        if (!seed.is_number_unsigned()) {
            throw ValidationError("config key 'seed' must be a non-negative integer");
        }
        c.seed = seed.get<std::uint64_t>();
    }
    return resolve(std::move(c));
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError(fmt::format("cannot read config '{}'", path.string()));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string dump_config(const RunConfig& c)
{
    json initial = {{"profile", c.profile}, {"amplitude", c.bump_amplitude}};
    if (c.bump_center) {
        initial["center"] = *c.bump_center;
    }
    if (c.bump_half_width) {
        initial["half_width"] = *c.bump_half_width;
    }
    const json root = {
        {"geometry", {{"m", c.m}, {"a", c.a}, {"R", c.R}}},
        {"physics", {{"kappa", c.kappa}, {"T", c.T}, {"lambda", c.lambda}}},
        {"initial", initial},
        {"grid", {{"Nr", c.Nr}, {"Nt", c.Nt}, {"scheme", c.scheme}, {"startup", c.startup}}},
        {"sweep",
         {{"lambda_min", c.lambda_min},
          {"lambda_max", c.lambda_max},
          {"lambda_count", c.lambda_count},
          {"quantities", c.quantities}}},
        {"output", {{"directory", c.out_dir}, {"formats", c.formats}, {"snapshots", c.snapshots}}},
        {"seed", c.seed},
    };
    return root.dump(2) + "\n";
}

std::string config_hash(const RunConfig& config)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump_config(config)) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", hash);
}

bool operator==(const RunConfig& lhs, const RunConfig& rhs)
{
    return dump_config(lhs) == dump_config(rhs);
}

RadialFunction make_profile(const RunConfig& c)
{
    const RadialDomain domain(c.m, c.a, c.R);
    if (c.profile == "bump") {
        return bump_profile(domain, *c.bump_center, *c.bump_half_width, c.bump_amplitude);
    }
    if (c.profile == "zero") {
        return zero_profile();
    }
    const auto mode = eigenmode_profile(domain, *eigenmode_index(c.profile));
    const double amplitude = c.bump_amplitude;
    return [mode, amplitude](double r) { return amplitude * mode(r); };
}

ProblemSpec make_problem(const RunConfig& c)
{
    ProblemSpec spec{RadialDomain(c.m, c.a, c.R)};
    spec.kappa = c.kappa;
    spec.lambda = c.lambda;
    spec.initial = make_profile(c);
    spec.scheme = scheme_of(c.scheme);
    spec.startup = startup_of(c.startup);
    return spec;
}

GridPtr make_grid(const RunConfig& c)
{
    return doismol::make_grid(RadialDomain(c.m, c.a, c.R), c.T, c.Nt, c.Nr);
}

SweepSpec make_sweep(const RunConfig& c, int jobs)
{
    SweepSpec sweep;
    sweep.lambdas = geometric_lambdas(c.lambda_min, c.lambda_max, c.lambda_count);
    for (const auto& q : c.quantities) {
        sweep.quantities.push_back(Quantity::parse(q));
    }
    sweep.problem = make_problem(c);
    sweep.grid = make_grid(c);
    sweep.jobs = jobs;
    return sweep;
}

RunConfig apply(RunConfig c, const Overrides& o)
{
    if (o.out_dir) {
        c.out_dir = *o.out_dir;
    }
    if (o.lambda_min) {
        c.lambda_min = *o.lambda_min;
    }
    if (o.lambda_max) {
        c.lambda_max = *o.lambda_max;
    }
    if (o.lambda_count) {
        c.lambda_count = *o.lambda_count;
    }
    if (o.scheme) {
        c.scheme = *o.scheme;
    }
    return resolve(std::move(c));
}

Fault parse_fault(const std::string& name)
{
    if (name.empty() || name == "none") {
        return Fault::None;
    }
    if (name == "lambda-sign") {
        return Fault::LambdaSign;
    }
    throw ValidationError(fmt::format("unknown fault '{}', expected 'lambda-sign'", name));
}

std::string csv_field(const std::string& text)
{
    if (text.find_first_of(",\"\r\n") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    out += '"';
    return out;
}

// ---- checks --------------------------------------------------------------

std::vector<VerifyCheck> run_checks(const RunConfig& config, Fault fault)
{
    const auto spec = make_problem(config);
    const auto grid = make_grid(config);
    EnergyOptions options;
    options.flip_lambda_sign = fault == Fault::LambdaSign;

    std::vector<VerifyCheck> checks;
    const Field p = solve_doi(spec, grid);
    const Field rho = solve_smoluchowski(spec, grid);

    const auto doi = check_energy_doi(p, spec, grid, options);
    checks.push_back(below("energy_doi_identity", energy_value(doi), 1e-10, degenerate_note(doi)));
    double smallest = 0.0;
    for (const auto& t : doi.lhs_terms) {
        smallest = std::min(smallest, t.value);
    }
    checks.push_back(above("energy_doi_terms_nonnegative", smallest, 0.0));

    const auto refined = check_energy_doi_refined(p, spec, grid, options);
    checks.push_back(below("energy_doi_refined_closure", energy_value(refined), 1e-10,
                           degenerate_note(refined)));

    const auto smol = check_energy_smol(rho, spec, grid);
    checks.push_back(
        below("energy_smol_mass", energy_value(smol.mass), 1e-10, degenerate_note(smol.mass)));
    checks.push_back(below("energy_smol_gradient", smol.gradient.degenerate ? 0.0 : smol.gradient.residual,
                           1e-2, degenerate_note(smol.gradient)));
    checks.push_back(below("smol_sup_level", smol.mass_sup_level, 0.0));

    // Transposition identity on the error field e = R_1 p - rho, h = trace p.
    const Field error = restrict_outer(p) - rho;
    const Field boundary = lateral_trace(p);
    std::mt19937_64 rng(config.seed);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        const Field v = random_annulus_field(grid, rng);
        worst = std::max(worst, transposition_residual(error, boundary, v, spec, grid));
    }
    checks.push_back(below("transposition_max_residual", worst, 5e-2));

    const auto table = check_modified_trace(p, trace_eps_list());
    checks.push_back(below("modified_trace_violations", table.violations, 0.0,
                           fmt::format("prefactor {:.6g}", table.prefactor)));

    // The interface flux mismatch is O(h): it has to shrink when h and dt halve.
    const double jump = coupling_residuals(p).flux_jump;
    if (jump == 0.0) {
        checks.push_back(below("coupling_flux_jump_ratio", 0.0, 0.75, "vacuous: no flux mismatch"));
    } else {
        const auto fine = make_grid(spec.domain, config.T, 2 * config.Nt, 2 * config.Nr);
        const double fine_jump = coupling_residuals(solve_doi(spec, fine)).flux_jump;
        checks.push_back(below("coupling_flux_jump_ratio", fine_jump / jump, 0.75,
                               fmt::format("flux jump {:.3e} -> {:.3e}", jump, fine_jump)));
    }

    // Backward Euler: lambda-monotonicity of the interior norm, positivity.
    ProblemSpec be = spec;
    be.scheme = Scheme::BackwardEuler;
    double growth = 0.0;
    double previous = -1.0;
    double lowest = 0.0;
    for (double factor : {0.1, 1.0, 10.0}) {
        be.lambda = std::max(config.lambda, 1.0) * factor;
        const Field q = solve_doi(be, grid);
        const double norm = l2(q, NormRegion::Q0);
        if (previous > 0.0) {
            growth = std::max(growth, norm / previous - 1.0);
        }
        previous = norm;
        for (double x : q.values()) {
            lowest = std::min(lowest, x);
        }
    }
    checks.push_back(below("lambda_monotone_be", growth, 1e-12));
    const auto g = Field::sample(grid, Region::Annulus,
                                 [&](double, double r) { return spec.initial(r); });
    double g_min = 0.0;
    for (double x : g.values()) {
        g_min = std::min(g_min, x);
    }
    if (g_min < 0.0) {
        checks.push_back(above("positivity_be", 0.0, 0.0, "vacuous: datum changes sign"));
    } else {
        checks.push_back(above("positivity_be", lowest, -1e-14 * std::max(1.0, g.max_abs())));
    }
    return checks;
}

// ---- commands ------------------------------------------------------------

int cmd_solve(const RunConfig& config, std::ostream& log)
{
    const auto dir = prepare_dir(config);
    const auto hash = config_hash(config);
    write_config(dir, config);
    const auto spec = make_problem(config);
    const auto grid = make_grid(config);
    const Field p = solve_doi(spec, grid);
    const Field rho = solve_smoluchowski(spec, grid);

    if (config.snapshots && wants(config, "csv")) {
        write_file(dir / "doi_snapshots.csv", snapshot_csv(p, hash));
        write_file(dir / "smol_snapshots.csv", snapshot_csv(rho, hash));
    }
    const auto doi = check_energy_doi(p, spec, grid);
    const auto refined = check_energy_doi_refined(p, spec, grid);
    const auto smol = check_energy_smol(rho, spec, grid);
    if (wants(config, "json")) {
        const json report = {
            {"config_hash", hash},
            {"lambda", config.lambda},
            {"doi", report_json(doi)},
            {"doi_refined", report_json(refined)},
            {"smol_mass", report_json(smol.mass)},
            {"smol_gradient", report_json(smol.gradient)},
            {"smol_mass_sup_level", smol.mass_sup_level},
            {"smol_gradient_sup_level", smol.gradient_sup_level},
        };
        write_file(dir / "energy_report.json", report.dump(2) + "\n");
    }
    fmt::print(log, "solve: lambda={} energy residual={:.3e} -> {}\n", config.lambda,
               doi.residual, dir.string());
    return ExitCode::Ok;
}

int cmd_sweep(const RunConfig& config, int jobs, std::ostream& log)
{
    const auto dir = prepare_dir(config);
    const auto hash = config_hash(config);
    write_config(dir, config);
    const auto sweep = make_sweep(config, jobs);
    const auto result = run_sweep(sweep);

    if (wants(config, "csv")) {
        std::string csv = "lambda,quantity,value,grid_h,grid_dt\n";
        for (const auto& row : result.rows) {
            csv += fmt::format("{},{},{},{},{}\n", number(row.lambda), csv_field(row.quantity),
                               number(row.value), number(sweep.grid->h()),
                               number(sweep.grid->dt()));
        }
        csv += fmt::format("# config_hash={}\n", hash);
        write_file(dir / "rates.csv", csv);
    }

    json claims = json::array();
    bool failed = false;
    for (const auto& q : sweep.quantities) {
        json entry = {{"quantity", q.name()}, {"claimed_exponent", q.claimed_exponent()}};
        try {
            const auto fit = fit_rate(result.rows, q.name(), result.discretization_floor);
            const auto verdict = check_claims({fit}).front();
            entry["slope"] = fit.slope;
            entry["intercept"] = fit.intercept;
            entry["r_squared"] = fit.r_squared;
            entry["bound_margin"] = fit.bound_margin;
            entry["margin_nonincreasing"] = fit.margin_nonincreasing;
            entry["points_used"] = fit.points_used;
            entry["points_dropped"] = fit.points_dropped;
            entry["status"] = verdict.pass ? "PASS" : "FAIL";
            failed = failed || !verdict.pass;
            fmt::print(log, "{:<28} slope {:+.4f} claimed -{:.4f} {}\n", q.name(), fit.slope,
                       fit.claimed_exponent, verdict.pass ? "PASS" : "FAIL");
        } catch (const DegenerateError& e) {
            entry["status"] = "DEGENERATE";
            entry["reason"] = e.what();
            fmt::print(log, "{:<28} DEGENERATE ({})\n", q.name(), e.what());
        }
        if (q.kind == QuantityKind::MainBoundRatio) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = 0.0;
            for (const auto& row : result.rows) {
                if (row.quantity == q.name()) {
                    lo = std::min(lo, row.value);
                    hi = std::max(hi, row.value);
                }
            }
            entry["spread"] = lo > 0.0 ? hi / lo : 0.0;
        }
        claims.push_back(entry);
    }
    if (wants(config, "json")) {
        const json verdict = {
            {"config_hash", hash},
            {"grid_h", sweep.grid->h()},
            {"grid_dt", sweep.grid->dt()},
            {"discretization_floor", result.discretization_floor},
            {"claims", claims},
        };
        write_file(dir / "verdict.json", verdict.dump(2) + "\n");
    }
    return failed ? ExitCode::ChecksFailed : ExitCode::Ok;
}

int cmd_verify(const RunConfig& config, Fault fault, std::ostream& log)
{
    const auto dir = prepare_dir(config);
    const auto hash = config_hash(config);
    write_config(dir, config);
    const auto checks = run_checks(config, fault);
    std::string text;
    bool failed = false;
    for (const auto& c : checks) {
        text += fmt::format("{:<30} {:>13.6e} {:>13.6e} {}{}\n", c.name, c.value, c.threshold,
                            c.pass ? "PASS" : "FAIL", c.note.empty() ? "" : "  # " + c.note);
        failed = failed || !c.pass;
    }
    log << text;
    if (wants(config, "csv")) {
        std::string csv = "check,value,threshold,status,note\n";
        for (const auto& c : checks) {
            csv += fmt::format("{},{},{},{},{}\n", csv_field(c.name), number(c.value),
                               number(c.threshold), c.pass ? "PASS" : "FAIL", csv_field(c.note));
        }
        csv += fmt::format("# config_hash={}\n", hash);
        write_file(dir / "verify.csv", csv);
    }
    return failed ? ExitCode::ChecksFailed : ExitCode::Ok;
}

int cmd_oracle_compare(const RunConfig& config, std::ostream& log)
{
    if (config.m != 3) {
        throw ValidationError("config key 'geometry.m': oracle-compare needs m = 3");
    }
    const auto dir = prepare_dir(config);
    const auto hash = config_hash(config);
    write_config(dir, config);
    const auto spec = make_problem(config);
    const RadialDomain domain(config.m, config.a, config.R);

    struct Level {
        std::string study;
        int nr, nt;
        double h, dt, linf, l2;
    };
    auto measure = [&](std::string study, int nr, int nt) {
        const auto grid = doismol::make_grid(domain, config.T, nt, nr);
        const Field diff = solve_smoluchowski(spec, grid) - series_solution(spec.initial, spec.kappa, grid);
        return Level{std::move(study), nr, nt, grid->h(), grid->dt(), diff.max_abs(),
                     l2(diff, NormRegion::Q1)};
    };
    // The configured grid, then a spatial study with 64x the time steps so
    // the time error of the first steps stays below the spatial one.
    std::vector<Level> levels = {measure("config", config.Nr, config.Nt)};
    for (int factor : {1, 2, 4}) {
        levels.push_back(measure("space", config.Nr * factor / 2, 64 * config.Nt));
    }
    std::string csv = "study,Nr,Nt,h,dt,linf_error,l2_error,observed_order\n";
    json rows = json::array();
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto& L = levels[i];
        double order = std::numeric_limits<double>::quiet_NaN();
        if (i > 1 && L.linf > 0.0 && levels[i - 1].linf > 0.0) {
            order = std::log2(levels[i - 1].linf / L.linf);
        }
        csv += fmt::format("{},{},{},{},{},{},{},{}\n", L.study, L.nr, L.nt, number(L.h), number(L.dt),
                           number(L.linf), number(L.l2), std::isnan(order) ? "" : number(order));
        json row = {{"study", L.study}, {"Nr", L.nr}, {"Nt", L.nt}, {"linf_error", L.linf}, {"l2_error", L.l2}};
        if (!std::isnan(order)) {
            row["observed_order"] = order;
        }
        rows.push_back(row);
        fmt::print(log, "{:<7} Nr={:<5} Nt={:<6} linf={:.3e} l2={:.3e}{}\n", L.study, L.nr, L.nt, L.linf,
                   L.l2, std::isnan(order) ? "" : fmt::format(" order={:.3f}", order));
    }
    csv += fmt::format("# config_hash={}\n", hash);
    if (wants(config, "csv")) {
        write_file(dir / "oracle_compare.csv", csv);
    }
    if (wants(config, "json")) {
        write_file(dir / "oracle_compare.json",
                   json({{"config_hash", hash}, {"levels", rows}}).dump(2) + "\n");
    }
    return ExitCode::Ok;
}

int run_guarded(const std::function<int()>& body, std::ostream& err)
{
    try {
        return body();
    } catch (const ValidationError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return ExitCode::InvalidInput;
    } catch (const DegenerateError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return ExitCode::InvalidInput;
    } catch (const SolverError& e) {
        fmt::print(err, "solver failure: {}\n", e.what());
        return ExitCode::SolverFailure;
    }
}

}  // namespace doismol
