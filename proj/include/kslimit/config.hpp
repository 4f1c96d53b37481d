#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kslimit/dynamics.hpp"
#include "kslimit/experiments.hpp"

namespace kslimit {

/// Everything a config file can set: the simulation plus optional sweep settings.
///
/// File format: INI-style sections [grid] [chi] [time] [init] [output]
/// [sweep] with `key = value` lines; lists are comma separated. Unknown
/// sections or keys are errors.
struct RunConfig {
    SimConfig sim;
    std::vector<double> lambdas;
    std::vector<double> comparison_times;
    bool use_linf = true;
    bool use_l2 = true;
    bool parallel = true;

    SweepConfig sweep() const;
};

/// Field-by-field equality of everything a config file can express.
bool same_settings(const RunConfig& a, const RunConfig& b);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical INI text with every key, doubles at 17 significant digits.
std::string to_ini(const RunConfig& cfg);

/// The same settings as indented `key: value` lines, `indent` spaces deep.
std::string to_manifest_block(const RunConfig& cfg, int indent);

/// Recovers the settings echoed under `config:` in a manifest.
RunConfig config_from_manifest(const std::string& manifest_text);

/// Locale-independent shortest round-trip text for a double (17 significant digits).
std::string format_double(double x);

}  // namespace kslimit
