#include "kslimit/app.hpp"

#include <chrono>
#include <ctime>
#include <ostream>
#include <system_error>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "kslimit/config.hpp"
#include "kslimit/errors.hpp"
#include "kslimit/experiments.hpp"
#include "kslimit/io.hpp"
#include "kslimit/theory.hpp"
#include "kslimit/verify.hpp"

namespace kslimit::app {

namespace fs = std::filesystem;

namespace {

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

void prepare_output_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::runtime_error(fmt::format("cannot create output directory '{}'", dir.string()));
    }
    const fs::path probe = dir / ".kslimit-write-test";
    io::write_file(probe, "");
    fs::remove(probe, ec);
}

struct Manifest {
    std::string command;
    std::string started;
    std::string finished;
    int exit_status = 0;
    std::vector<std::pair<std::string, std::string>> facts;
    const RunConfig* config = nullptr;
    std::vector<std::string> outputs;

    std::string text() const {
        std::string out;
        out += "artifact: kslimit\n";
        out += fmt::format("version: {}\n", kVersion);
        out += fmt::format("command: {}\n", command);
        out += fmt::format("started: {}\n", started);
        out += fmt::format("finished: {}\n", finished);
        out += fmt::format("exit_status: {}\n", exit_status);
        for (const auto& [k, v] : facts) out += fmt::format("{}: {}\n", k, v);
        if (config) {
            out += "config:\n";
            out += to_manifest_block(*config, 2);
        }
        out += "outputs:\n";
        for (const std::string& o : outputs) out += fmt::format("  - {}\n", o);
        return out;
    }
};

void finish(Manifest& m, const fs::path& dir) {
    m.finished = timestamp();
    m.outputs.push_back("manifest.txt");
    io::write_file(dir / "manifest.txt", m.text());
}

}  // namespace

int cmd_run(const fs::path& config, const fs::path& out_dir, std::ostream& log) {
    Manifest manifest{"run", timestamp()};
    RunConfig cfg;
    try {
        cfg = load_config(config);
        prepare_output_dir(out_dir);
    } catch (const std::exception& e) {
        fmt::print(log, "error: {}\n", e.what());
        return kConfigOrIoError;
    }
    manifest.config = &cfg;

    try {
        const RunResult result = run(cfg.sim);
        io::write_file(out_dir / "diagnostics.csv", io::diagnostics_csv(result.records));
        manifest.outputs.push_back("diagnostics.csv");
        for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
            const std::string name = fmt::format("snapshot_{:04d}.txt", i);
            io::write_file(out_dir / name, io::snapshot_text(result.snapshots[i]));
            manifest.outputs.push_back(name);
        }
        manifest.facts.emplace_back("steps", std::to_string(result.steps));
        manifest.facts.emplace_back("final_time", format_double(result.final_state.t));
        manifest.facts.emplace_back("blowup", result.blew_up ? "true" : "false");
        if (result.blew_up) {
            manifest.facts.emplace_back("blowup_time", format_double(result.blowup_time));
            manifest.exit_status = kBlowUp;
            fmt::print(log, "blow-up flag raised at t = {}\n", result.blowup_time);
        }
        finish(manifest, out_dir);
        return manifest.exit_status;
    } catch (const std::exception& e) {
        fmt::print(log, "error: {}\n", e.what());
        manifest.exit_status = kConfigOrIoError;
        manifest.facts.emplace_back("error", e.what());
        try {
            finish(manifest, out_dir);
        } catch (const std::exception&) {
        }
        return kConfigOrIoError;
    }
}

int cmd_sweep(const fs::path& config, const fs::path& out_dir, std::ostream& log) {
    Manifest manifest{"sweep", timestamp()};
    RunConfig cfg;
    try {
        cfg = load_config(config);
        validate(cfg.sweep());
        prepare_output_dir(out_dir);
    } catch (const std::exception& e) {
        fmt::print(log, "error: {}\n", e.what());
        return kConfigOrIoError;
    }
    manifest.config = &cfg;

    try {
        const SweepResult result = lambda_sweep(cfg.sweep());
        io::write_file(out_dir / "sweep.csv", io::sweep_csv(result));
        io::write_file(out_dir / "summary.csv", io::summary_csv(result));
        manifest.outputs = {"sweep.csv", "summary.csv"};
        manifest.facts.emplace_back("verdict", to_string(result.verdict));
        auto join = [](const std::vector<double>& xs) {
            std::string s;
            for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + format_double(xs[i]);
            return s;
        };
        manifest.facts.emplace_back("ratio_u", join(result.ratio_u));
        manifest.facts.emplace_back("ratio_v", join(result.ratio_v));
        finish(manifest, out_dir);
        fmt::print(log, "verdict: {}\n", to_string(result.verdict));
        return kSuccess;
    } catch (const SweepError& e) {
        fmt::print(log, "error: {}\n", e.what());
        manifest.exit_status = e.blowup() ? kBlowUp : kConfigOrIoError;
        manifest.facts.emplace_back("failed_lambda", format_double(e.lambda()));
        manifest.facts.emplace_back("error", e.what());
        try {
            finish(manifest, out_dir);
        } catch (const std::exception&) {
        }
        return manifest.exit_status;
    } catch (const std::exception& e) {
        fmt::print(log, "error: {}\n", e.what());
        return kConfigOrIoError;
    }
}

int cmd_thresholds(const ThresholdArgs& args, std::ostream& out, std::ostream& log) {
    const ChiParams chi{1.0, args.a, args.k};
    try {
        validate(chi);
        if (args.n < 1) throw ConfigError(fmt::format("n must be >= 1 (got {})", args.n));
        if (!(args.eta >= 0.0)) throw ConfigError(fmt::format("eta must be >= 0 (got {})", args.eta));
        if (args.lambdas.empty()) throw ConfigError("the lambda grid must not be empty");
        for (double l : args.lambdas) {
            if (!(l >= 0.0)) throw ConfigError(fmt::format("lambda must be >= 0 (got {})", l));
        }
    } catch (const std::exception& e) {
        fmt::print(log, "error: {}\n", e.what());
        return kConfigOrIoError;
    }

    const theory::Threshold pe = theory::threshold_chi0_pe(args.n, chi, args.eta);
    if (args.csv) {
        fmt::print(out, "lambda,threshold_pp,threshold_pe,pp_equals_pe\n");
    } else {
        fmt::print(out, "n = {}, k = {}, a = {}, eta = {}\n", args.n, format_double(args.k),
                   format_double(args.a), format_double(args.eta));
        fmt::print(out, "{:>24} {:>24} {:>24}\n", "lambda", "threshold_pp", "threshold_pe");
    }
    for (double lambda : args.lambdas) {
        const theory::Threshold pp = theory::threshold_chi0_pp(args.n, lambda, chi, args.eta);
        if (args.csv) {
            fmt::print(out, "{},{},{},{}\n", format_double(lambda), format_double(pp.value),
                       format_double(pe.value), pp.value == pe.value ? 1 : 0);
        } else {
            fmt::print(out, "{:>24} {:>24} {:>24}\n", format_double(lambda), format_double(pp.value),
                       format_double(pe.value));
        }
    }
    if (!args.csv) {
        const double at_zero = theory::threshold_chi0_pp(args.n, 0.0, chi, args.eta).value;
        fmt::print(out, "lambda = 0 check: threshold_pp {} threshold_pe\n",
                   at_zero == pe.value ? "==" : "!=");
        if (pe.vacuous) fmt::print(out, "note: a + eta = 0, the threshold is vacuous\n");
    }
    return kSuccess;
}

int cmd_verify(std::uint64_t seed, std::ostream& out) {
    const verify::Report report = verify::run_all(seed);
    fmt::print(out, "seed: {}\n", report.seed);
    for (const verify::PropertyResult& p : report.properties) {
        fmt::print(out, "[{}] {} ({} checks): {}\n", p.passed ? "PASS" : "FAIL", p.name, p.checks,
                   p.detail);
    }
    fmt::print(out,
               "info: {} sampled sets satisfy the k-exponent condition but not the (k-1)-exponent "
               "one; {} of them have H > 0 somewhere on [eta, eta+1e4]\n",
               report.printed_only_sets, report.printed_only_positive_h);
    return report.all_passed() ? kSuccess : kPropertyFailure;
}

int cmd_estimate_c0(const C0Args& args, std::ostream& out, std::ostream& log) {
    C0Estimate est{Grid::line(1.0, 4)};
    try {
        const Grid g = build_grid(args.dim, args.extents, args.cells);
        est = estimate_c0(g, args.t_star, args.probes);
    } catch (const std::exception& e) {
        fmt::print(log, "error: {}\n", e.what());
        return kConfigOrIoError;
    }
    const Grid& g = est.grid;
    auto coords = [&](std::size_t cell) {
        const int i = static_cast<int>(cell % static_cast<std::size_t>(g.nx()));
        const int j = static_cast<int>(cell / static_cast<std::size_t>(g.nx()));
        return std::pair{g.x_center(i), g.dim() == 2 ? g.y_center(j) : 0.0};
    };
    if (args.csv) {
        fmt::print(out, "cell,x,y,min_w\n");
        for (std::size_t i = 0; i < est.probes.size(); ++i) {
            const auto [x, y] = coords(est.probes[i]);
            fmt::print(out, "{},{},{},{}\n", est.probes[i], format_double(x), format_double(y),
                       format_double(est.probe_minima[i]));
        }
    } else {
        fmt::print(out, "t_star = {}, probes = {}\n", format_double(est.t_star), est.probes.size());
        for (std::size_t i = 0; i < est.probes.size(); ++i) {
            const auto [x, y] = coords(est.probes[i]);
            fmt::print(out, "  source cell {} at ({}, {}): min w = {}\n", est.probes[i],
                       format_double(x), format_double(y), format_double(est.probe_minima[i]));
        }
        fmt::print(out, "c0 = {}\n", format_double(est.c0));
    }
    return kSuccess;
}

}  // namespace kslimit::app
