#pragma once

#include "doismol/domain_grid.hpp"
#include "doismol/rates.hpp"
#include "doismol/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace doismol {

/// Everything a run needs. Loaded from JSON; unknown keys are rejected and
/// every run writes the fully resolved config next to its results.
struct RunConfig {
    // geometry
    int m = 3;
    double a = 1.0;
    double R = 2.0;
    // physics
    double kappa = 1.0;
    double T = 0.5;
    double lambda = 1e3;
    // initial datum: "bump", "eigenmode(k)" or "zero"
    std::string profile = "bump";
    std::optional<double> bump_center;      // default (a + R) / 2
    std::optional<double> bump_half_width;  // default 0.4 (R - a)
    double bump_amplitude = 1.0;
    // grid
    int Nr = 256;
    int Nt = 512;
    std::string scheme = "cn";
    std::string startup = "auto";
    // sweep
    double lambda_min = 1e2;
    double lambda_max = 1e6;
    int lambda_count = 9;
    std::vector<std::string> quantities = {
        "interior_l2q0",         "interior_supt_l2",       "trace_l2sigma0",
        "exterior_error_l2q1",   "frac_interior(0.6,0.6)", "frac_exterior(0.5,0.5)",
        "main_bound_ratio",
    };
    // output
    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv", "json"};
    bool snapshots = true;
    // random test fields
    std::uint64_t seed = 20240611;
};

/// Validates and fills in profile defaults. Throws ValidationError naming
/// the offending key.
RunConfig resolve(RunConfig config);

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
/// Pretty-printed JSON with sorted keys; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& config);
/// 64-bit FNV-1a of dump_config, as 16 hex digits.
std::string config_hash(const RunConfig& config);

bool operator==(const RunConfig& lhs, const RunConfig& rhs);

RadialFunction make_profile(const RunConfig& config);
ProblemSpec make_problem(const RunConfig& config);
GridPtr make_grid(const RunConfig& config);
SweepSpec make_sweep(const RunConfig& config, int jobs);

/// Command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<double> lambda_min;
    std::optional<double> lambda_max;
    std::optional<int> lambda_count;
    std::optional<std::string> scheme;
};

RunConfig apply(RunConfig config, const Overrides& overrides);

enum ExitCode : int { Ok = 0, InvalidInput = 1, SolverFailure = 2, ChecksFailed = 3 };

struct VerifyCheck {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string note;
};

/// Debug faults for cmd_verify.
enum class Fault { None, LambdaSign };

Fault parse_fault(const std::string& name);

/// The property suite behind cmd_verify, without any file output.
std::vector<VerifyCheck> run_checks(const RunConfig& config, Fault fault = Fault::None);

/// Each command writes into config.out_dir and returns an ExitCode. Errors
/// surface as exceptions; run_guarded maps them to exit codes.
int cmd_solve(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, int jobs, std::ostream& log);
int cmd_verify(const RunConfig& config, Fault fault, std::ostream& log);
int cmd_oracle_compare(const RunConfig& config, std::ostream& log);

int run_guarded(const std::function<int()>& body, std::ostream& err);

/// RFC-4180 field: quoted when it holds a comma, quote or line break.
std::string csv_field(const std::string& text);

}  // namespace doismol
