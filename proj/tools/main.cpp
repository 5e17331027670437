#include "doismol/cli.hpp"

#include <iostream>

#include "CLI11.hpp"

namespace {

struct Options {
    std::string config_path;
    int jobs = 1;
    std::string fault;
    doismol::Overrides overrides;
};

void add_common(CLI::App& sub, Options& opt)
{
    sub.add_option("--config", opt.config_path, "JSON run config (defaults if omitted)");
    sub.add_option("--out", opt.overrides.out_dir, "output directory");
    sub.add_option("--scheme", opt.overrides.scheme, "time scheme")
        ->check(CLI::IsMember({"be", "cn"}));
}

doismol::RunConfig load(const Options& opt)
{
    auto config = opt.config_path.empty() ? doismol::resolve(doismol::RunConfig{})
                                           : doismol::load_config(opt.config_path);
    return doismol::apply(std::move(config), opt.overrides);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Doi / Smoluchowski large-coupling verification lab"};
    app.require_subcommand(1);
    Options opt;

    auto* solve = app.add_subcommand("solve", "solve both problems, write snapshots and energy report");
    add_common(*solve, opt);

    auto* sweep = app.add_subcommand("sweep", "lambda sweep, rate fits and claim verdicts");
    add_common(*sweep, opt);
    sweep->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--lambda-min", opt.overrides.lambda_min, "smallest lambda");
    sweep->add_option("--lambda-max", opt.overrides.lambda_max, "largest lambda");
    sweep->add_option("--lambda-count", opt.overrides.lambda_count, "number of lambda values");

    auto* verify = app.add_subcommand("verify", "property suite, one PASS/FAIL line per check");
    add_common(*verify, opt);
    verify->add_option("--inject-fault", opt.fault, "debug fault (lambda-sign)");

    auto* oracle = app.add_subcommand("oracle-compare", "Smoluchowski solver against the series");
    add_common(*oracle, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : doismol::ExitCode::InvalidInput;
    }

    return doismol::run_guarded(
        [&]() -> int {
            const auto config = load(opt);
            if (solve->parsed()) {
                return doismol::cmd_solve(config, std::cout);
            }
            if (sweep->parsed()) {
                return doismol::cmd_sweep(config, opt.jobs, std::cout);
            }
            if (verify->parsed()) {
                return doismol::cmd_verify(config, doismol::parse_fault(opt.fault), std::cout);
            }
            return doismol::cmd_oracle_compare(config, std::cout);
        },
        std::cerr);
}
