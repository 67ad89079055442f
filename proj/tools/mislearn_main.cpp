// Command-line front end for the mislearning pipeline: simulation-based
// proposition checks, two-model estimation, predictive regressions and the
// cross-sectional decomposition diagnostics.

#include <CLI11.hpp>
#include <exception>
#include <iostream>

#include "commands.hpp"
#include "mislearn/errors.hpp"

int main(int argc, char** argv) {
    using namespace mislearn;
    using namespace mislearn::cli;

    CLI::App app{"misspecified-learning pipeline"};
    app.require_subcommand(1);

    GlobalArgs args;
    std::uint64_t seed_flag = 0;
    bool seed_set = false;
    app.add_option("--config", args.config_path, "configuration file (key = value with sections)");
    app.add_option("--out", args.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed_flag, "seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--threads", args.threads, "worker threads")->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "run the proposition check suites");
    auto* fit = app.add_subcommand("fit", "estimate stable and break models per series");
    auto* regress = app.add_subcommand("regress", "predictive regressions on forward outcomes");
    auto* xsec = app.add_subcommand("xsec", "cross-sectional decomposition diagnostics");
    auto* report = app.add_subcommand("report", "plot-ready state and delta series");
    for (auto* sub : {sim, fit, regress, xsec, report}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    if (seed_set) args.seed = seed_flag;

    try {
        KeyValueConfig cfg;
        if (!args.config_path.empty()) cfg = KeyValueConfig::parse_file(args.config_path);
        if (sim->parsed()) return cmd_simulate(cfg, args);
        if (fit->parsed()) return cmd_fit(cfg, args);
        if (regress->parsed()) return cmd_regress(cfg, args);
        if (xsec->parsed()) return cmd_xsec(cfg, args);
        if (report->parsed()) return cmd_report(cfg, args);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
