// Command-line front end: bounds / verify / solve on a problem file.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ovk/ovk.hpp"

namespace {

struct SharedArgs {
    std::string problem;
    ovk::CliOptions opts;
};

void attach_common(CLI::App* cmd, SharedArgs& args) {
    cmd->add_option("--problem", args.problem, "problem file to load")->required();
    cmd->add_option("--s", args.opts.s, "base scale in (0,1), overrides the file");
    cmd->add_option("--tau-frac", args.opts.tau_frac,
                    "fraction of tau_max used as horizon");
    cmd->add_option("--step", args.opts.step, "max time step (0 = horizon/1000)");
    cmd->add_option("--max-iter", args.opts.max_iter, "iteration budget");
    cmd->add_option("--tol", args.opts.tol, "residual tolerance");
    cmd->add_option("--theta", args.opts.theta, "triangle margin of the grid");
    cmd->add_option("--seed", args.opts.seed, "seed for all sampling");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"existence-frame toolkit for first-order analytic evolution problems"};
    app.require_subcommand(1);

    SharedArgs bounds_args, verify_args, solve_args;

    CLI::App* bounds = app.add_subcommand(
        "bounds", "estimate the operator constants and the admissible lifetime");
    attach_common(bounds, bounds_args);

    CLI::App* verify = app.add_subcommand(
        "verify", "check the structural hypotheses the existence frame rests on");
    attach_common(verify, verify_args);

    CLI::App* solve = app.add_subcommand(
        "solve", "run the fixed-point iteration and report per-grid residuals");
    attach_common(solve, solve_args);
    solve->add_option("--out", solve_args.opts.out_path, "write the CSV report here");
    solve->add_flag("--timing", solve_args.opts.timing,
                    "record real per-iteration times (CSV stops being reproducible)");

    CLI11_PARSE(app, argc, argv);

    if (bounds->parsed()) {
        return ovk::run_command_guarded(ovk::Command::Bounds, bounds_args.problem,
                                        bounds_args.opts, std::cout, std::cerr);
    }
    if (verify->parsed()) {
        return ovk::run_command_guarded(ovk::Command::Verify, verify_args.problem,
                                        verify_args.opts, std::cout, std::cerr);
    }
    return ovk::run_command_guarded(ovk::Command::Solve, solve_args.problem,
                                    solve_args.opts, std::cout, std::cerr);
}
