// Command-line entry point: run, sweep, thresholds, verify, estimate-c0.

#include <iostream>

#include <CLI11.hpp>

#include "kslimit/app.hpp"
#include "kslimit/verify.hpp"

int main(int argc, char** argv) {
    using namespace kslimit::app;

    CLI::App cli{"Chemotaxis fast-signal-diffusion-limit laboratory"};
    cli.require_subcommand(1);
    cli.set_version_flag("--version", kVersion);

    std::string config;
    std::string out_dir = "out";
    std::uint64_t seed = kslimit::verify::kDefaultSeed;
    bool csv = false;

    auto* run = cli.add_subcommand("run", "integrate one configuration, write diagnostics and snapshots");
    run->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory")->capture_default_str();

    auto* sweep = cli.add_subcommand("sweep", "lambda sweep against the lambda = 0 reference");
    sweep->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out_dir, "output directory")->capture_default_str();

    ThresholdArgs th;
    auto* thresholds = cli.add_subcommand("thresholds", "tabulate the chi0 smallness thresholds");
    thresholds->add_option("--n", th.n, "space dimension n >= 1")->capture_default_str();
    thresholds->add_option("--k", th.k, "sensitivity decay exponent k > 1")->capture_default_str();
    thresholds->add_option("--a", th.a, "sensitivity offset a >= 0")->capture_default_str();
    thresholds->add_option("--eta", th.eta, "lower bound eta >= 0 of the signal")->capture_default_str();
    thresholds->add_option("--lambdas", th.lambdas, "lambda grid")->delimiter(',')->capture_default_str();
    thresholds->add_flag("--csv", csv, "machine-readable output");

    auto* verify = cli.add_subcommand("verify", "randomized property suites for the closed forms");
    verify->add_option("--seed", seed, "RNG seed")->capture_default_str();

    C0Args c0;
    auto* estimate = cli.add_subcommand("estimate-c0", "lower bound of the Neumann kernel of w_t = Lap w - w");
    estimate->add_option("--dim", c0.dim, "grid dimension (1 or 2)")->capture_default_str();
    estimate->add_option("--extent", c0.extents, "extent per axis")->delimiter(',')->capture_default_str();
    estimate->add_option("--cells", c0.cells, "cells per axis")->delimiter(',')->capture_default_str();
    estimate->add_option("--t-star", c0.t_star, "evaluation time")->capture_default_str();
    estimate->add_option("--probes", c0.probes, "number of source cells")->capture_default_str();
    estimate->add_flag("--csv", csv, "machine-readable output");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? kSuccess : kConfigOrIoError;
    }

    if (*run) return cmd_run(config, out_dir, std::cerr);
    if (*sweep) return cmd_sweep(config, out_dir, std::cerr);
    if (*thresholds) {
        th.csv = csv;
        return cmd_thresholds(th, std::cout, std::cerr);
    }
    if (*verify) return cmd_verify(seed, std::cout);
    if (*estimate) {
        c0.csv = csv;
        return cmd_estimate_c0(c0, std::cout, std::cerr);
    }
    return kConfigOrIoError;
}
