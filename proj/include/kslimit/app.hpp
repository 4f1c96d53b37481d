#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace kslimit::app {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kSuccess = 0,
    kConfigOrIoError = 1,
    kBlowUp = 2,
    kPropertyFailure = 3,
};

inline constexpr const char* kVersion = "0.1.0";

int cmd_run(const std::filesystem::path& config, const std::filesystem::path& out_dir,
            std::ostream& log);

int cmd_sweep(const std::filesystem::path& config, const std::filesystem::path& out_dir,
              std::ostream& log);

struct ThresholdArgs {
    int n = 2;
    double k = 2.0;
    double a = 1.0;
    double eta = 0.0;
    std::vector<double> lambdas{0.0, 0.5, 1.0, 2.0};
    bool csv = false;
};

int cmd_thresholds(const ThresholdArgs& args, std::ostream& out, std::ostream& log);

int cmd_verify(std::uint64_t seed, std::ostream& out);

struct C0Args {
    int dim = 1;
    std::vector<double> extents{1.0};
    std::vector<int> cells{256};
    double t_star = 1.0;
    int probes = 9;
    bool csv = false;
};

int cmd_estimate_c0(const C0Args& args, std::ostream& out, std::ostream& log);

}  // namespace kslimit::app
