#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "geotrack/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Geometric tracking simulator for constrained mechanical systems"};
    app.require_subcommand(1);

    geotrack::RunOptions opts;
    std::string target;
    std::string export_path;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-o,--out-dir", opts.out_dir, "Directory for output files");
        cmd->add_option("--dt", opts.dt, "Integration step size override");
        cmd->add_option("--duration", opts.duration, "Run length override in seconds");
        cmd->add_flag("--strict-ic", opts.strict_ic,
                      "Reject infeasible initial data instead of repairing it");
    };

    CLI::App* run = app.add_subcommand("run", "Simulate a preset or a scenario file");
    run->add_option("scenario", target, "Preset name or scenario file path")->required();
    run->add_option("--controller", opts.controller,
                    "Control law: agat, or pdff (rigid body only)");
    add_common(run);

    CLI::App* compare =
        app.add_subcommand("compare-so3", "Run both rigid-body control laws on two starts");
    compare->alias("compare_so3");
    add_common(compare);

    CLI::App* sweep =
        app.add_subcommand("sweep", "Probe convergence from random sphere starts");
    sweep->add_option("--count", opts.count, "Number of random starts");
    sweep->add_option("--seed", opts.seed, "Random seed");
    add_common(sweep);

    CLI::App* exp = app.add_subcommand("export", "Write a preset as an editable scenario file");
    exp->add_option("preset", target, "Preset name")->required();
    exp->add_option("file", export_path, "Destination path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return geotrack::run_scenario(target, opts).exit_code;
        if (compare->parsed()) return geotrack::compare_so3(opts);
        if (sweep->parsed()) return geotrack::sweep_basin(opts);
        return geotrack::export_preset(target, export_path);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
}
