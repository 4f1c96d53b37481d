#include "kslimit/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "kslimit/errors.hpp"

namespace kslimit {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"grid", {"dim", "extent", "cells"}},
        {"chi", {"chi0", "a", "k"}},
        {"time", {"lambda", "dt", "t_end", "solver_tol", "flux", "blowup_factor"}},
        {"init", {"preset", "u_base", "u_amp", "v_base", "v_amp", "sigma", "center"}},
        {"output", {"cadence", "snapshot_times", "q", "lyapunov_p", "lyapunov_eps", "eta"}},
        {"sweep", {"lambdas", "comparison_times", "norms", "parallel"}},
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, text));
    }
    return x;
}

int parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    int x = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, text));
    }
    return x;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true") return true;
    if (t == "false") return false;
    throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, text));
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const std::string& item : split_list(text)) out.push_back(parse_double(key, item));
    return out;
}

std::vector<int> parse_ints(const std::string& key, const std::string& text) {
    std::vector<int> out;
    for (const std::string& item : split_list(text)) out.push_back(parse_int(key, item));
    return out;
}

RunConfig from_tree(const pt::ptree& tree) {
    for (const auto& [section, body] : tree) {
        const auto it = known_keys().find(section);
        if (!body.data().empty()) {
            throw ConfigError(fmt::format("{}: key outside of any section", section));
        }
        if (it == known_keys().end()) {
            throw ConfigError(fmt::format("[{}]: unknown section", section));
        }
        for (const auto& [key, value] : body) {
            if (!it->second.contains(key)) {
                throw ConfigError(fmt::format("{}.{}: unknown key", section, key));
            }
            if (!value.empty()) {
                throw ConfigError(fmt::format("{}.{}: nested values are not allowed", section, key));
            }
        }
    }

    RunConfig cfg;
    SimConfig& s = cfg.sim;
    auto get = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return *v;
        return std::nullopt;
    };

    if (auto v = get("grid.dim")) s.dim = parse_int("grid.dim", *v);
    if (auto v = get("grid.extent")) s.extents = parse_doubles("grid.extent", *v);
    else s.extents.assign(static_cast<std::size_t>(std::max(s.dim, 1)), 1.0);
    if (auto v = get("grid.cells")) s.cells = parse_ints("grid.cells", *v);
    else s.cells.assign(static_cast<std::size_t>(std::max(s.dim, 1)), 512);
    if (s.dim != 1 && s.dim != 2) {
        throw ConfigError(fmt::format("grid.dim: must be 1 or 2 (got {})", s.dim));
    }
    if (s.extents.size() != static_cast<std::size_t>(s.dim)) {
        throw ConfigError(fmt::format("grid.extent: expected {} values", s.dim));
    }
    if (s.cells.size() != static_cast<std::size_t>(s.dim)) {
        throw ConfigError(fmt::format("grid.cells: expected {} values", s.dim));
    }

    if (auto v = get("chi.chi0")) s.chi.chi0 = parse_double("chi.chi0", *v);
    if (auto v = get("chi.a")) s.chi.a = parse_double("chi.a", *v);
    if (auto v = get("chi.k")) s.chi.k = parse_double("chi.k", *v);

    if (auto v = get("time.lambda")) s.lambda = parse_double("time.lambda", *v);
    if (auto v = get("time.dt")) s.dt = parse_double("time.dt", *v);
    if (auto v = get("time.t_end")) s.t_end = parse_double("time.t_end", *v);
    if (auto v = get("time.solver_tol")) s.solver_tol = parse_double("time.solver_tol", *v);
    if (auto v = get("time.blowup_factor")) s.blowup_factor = parse_double("time.blowup_factor", *v);
    if (auto v = get("time.flux")) {
        const std::string f = trim(*v);
        if (f == "centered") s.flux = FluxMode::centered;
        else if (f == "upwind") s.flux = FluxMode::upwind;
        else throw ConfigError(fmt::format("time.flux: expected centered or upwind, got '{}'", f));
    }

    if (auto v = get("init.preset")) {
        const std::string p = trim(*v);
        if (p == "constant") s.init.preset = InitPreset::constant;
        else if (p == "gaussian-bump") s.init.preset = InitPreset::gaussian_bump;
        else throw ConfigError(fmt::format("init.preset: expected constant or gaussian-bump, got '{}'", p));
    }
    if (auto v = get("init.u_base")) s.init.u_base = parse_double("init.u_base", *v);
    if (auto v = get("init.u_amp")) s.init.u_amp = parse_double("init.u_amp", *v);
    if (auto v = get("init.v_base")) s.init.v_base = parse_double("init.v_base", *v);
    if (auto v = get("init.v_amp")) s.init.v_amp = parse_double("init.v_amp", *v);
    if (auto v = get("init.sigma")) s.init.sigma = parse_double("init.sigma", *v);
    if (auto v = get("init.center")) s.init.center = parse_doubles("init.center", *v);

    if (auto v = get("output.cadence")) s.cadence = parse_int("output.cadence", *v);
    if (auto v = get("output.snapshot_times")) s.snapshot_times = parse_doubles("output.snapshot_times", *v);
    if (auto v = get("output.q")) s.q = parse_double("output.q", *v);
    if (auto v = get("output.lyapunov_p")) s.lyapunov_p = parse_double("output.lyapunov_p", *v);
    if (auto v = get("output.lyapunov_eps")) s.lyapunov_eps = parse_double("output.lyapunov_eps", *v);
    if (auto v = get("output.eta")) s.eta = parse_double("output.eta", *v);

    if (auto v = get("sweep.lambdas")) cfg.lambdas = parse_doubles("sweep.lambdas", *v);
    if (auto v = get("sweep.comparison_times")) {
        cfg.comparison_times = parse_doubles("sweep.comparison_times", *v);
    }
    if (auto v = get("sweep.norms")) {
        cfg.use_linf = cfg.use_l2 = false;
        for (const std::string& n : split_list(*v)) {
            if (n == "linf") cfg.use_linf = true;
            else if (n == "l2") cfg.use_l2 = true;
            else throw ConfigError(fmt::format("sweep.norms: unknown norm '{}'", n));
        }
        if (!cfg.use_linf && !cfg.use_l2) throw ConfigError("sweep.norms: select linf and/or l2");
    }
    if (auto v = get("sweep.parallel")) cfg.parallel = parse_bool("sweep.parallel", *v);

    try {
        validate(s);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

template <typename T, typename Fmt>
std::string join(const std::vector<T>& xs, Fmt&& f) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += f(xs[i]);
    }
    return out;
}

// Ordered (section, [(key, value)]) rendering shared by the INI and manifest writers.
std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections(
    const RunConfig& cfg) {
    const SimConfig& s = cfg.sim;
    auto d = [](double x) { return format_double(x); };
    auto i = [](int x) { return std::to_string(x); };
    std::string norms = cfg.use_linf && cfg.use_l2 ? "linf, l2" : cfg.use_linf ? "linf" : "l2";
    return {
        {"grid", {{"dim", i(s.dim)}, {"extent", join(s.extents, d)}, {"cells", join(s.cells, i)}}},
        {"chi", {{"chi0", d(s.chi.chi0)}, {"a", d(s.chi.a)}, {"k", d(s.chi.k)}}},
        {"time",
         {{"lambda", d(s.lambda)},
          {"dt", d(s.dt)},
          {"t_end", d(s.t_end)},
          {"solver_tol", d(s.solver_tol)},
          {"flux", s.flux == FluxMode::centered ? "centered" : "upwind"},
          {"blowup_factor", d(s.blowup_factor)}}},
        {"init",
         {{"preset", s.init.preset == InitPreset::constant ? "constant" : "gaussian-bump"},
          {"u_base", d(s.init.u_base)},
          {"u_amp", d(s.init.u_amp)},
          {"v_base", d(s.init.v_base)},
          {"v_amp", d(s.init.v_amp)},
          {"sigma", d(s.init.sigma)},
          {"center", join(s.init.center, d)}}},
        {"output",
         {{"cadence", i(s.cadence)},
          {"snapshot_times", join(s.snapshot_times, d)},
          {"q", d(s.q)},
          {"lyapunov_p", d(s.lyapunov_p)},
          {"lyapunov_eps", d(s.lyapunov_eps)},
          {"eta", d(s.eta)}}},
        {"sweep",
         {{"lambdas", join(cfg.lambdas, d)},
          {"comparison_times", join(cfg.comparison_times, d)},
          {"norms", norms},
          {"parallel", cfg.parallel ? "true" : "false"}}},
    };
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

SweepConfig RunConfig::sweep() const {
    return {sim, lambdas, comparison_times, use_linf, use_l2, parallel};
}

bool same_settings(const RunConfig& a, const RunConfig& b) {
    const SimConfig& x = a.sim;
    const SimConfig& y = b.sim;
    return x.dim == y.dim && x.extents == y.extents && x.cells == y.cells && x.chi == y.chi &&
           x.lambda == y.lambda && x.dt == y.dt && x.t_end == y.t_end && x.init == y.init &&
           x.solver_tol == y.solver_tol && x.flux == y.flux && x.cadence == y.cadence &&
           x.snapshot_times == y.snapshot_times && x.q == y.q && x.lyapunov_p == y.lyapunov_p &&
           x.lyapunov_eps == y.lyapunov_eps && x.eta == y.eta &&
           x.blowup_factor == y.blowup_factor && a.lambdas == b.lambdas &&
           a.comparison_times == b.comparison_times && a.use_linf == b.use_linf &&
           a.use_l2 == b.use_l2 && a.parallel == b.parallel;
}

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
    }
    return from_tree(tree);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_ini(const RunConfig& cfg) {
    std::string out;
    for (const auto& [section, entries] : sections(cfg)) {
        out += fmt::format("[{}]\n", section);
        for (const auto& [key, value] : entries) out += fmt::format("{} = {}\n", key, value);
    }
    return out;
}

std::string to_manifest_block(const RunConfig& cfg, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    std::string out;
    for (const auto& [section, entries] : sections(cfg)) {
        out += fmt::format("{}{}:\n", pad, section);
        for (const auto& [key, value] : entries) out += fmt::format("{}  {}: {}\n", pad, key, value);
    }
    return out;
}

RunConfig config_from_manifest(const std::string& manifest_text) {
    std::istringstream in(manifest_text);
    std::string line;
    bool inside = false;
    std::size_t section_indent = 0;
    std::string ini;
    while (std::getline(in, line)) {
        if (!inside) {
            if (trim(line) == "config:" && line.find_first_not_of(' ') == 0) inside = true;
            continue;
        }
        const auto indent = line.find_first_not_of(' ');
        if (indent == std::string::npos) continue;
        if (indent == 0) break;
        const std::string body = trim(line);
        const auto colon = body.find(':');
        if (colon == std::string::npos) {
            throw ConfigError(fmt::format("manifest config line without ':': '{}'", body));
        }
        const std::string key = body.substr(0, colon);
        const std::string value = trim(body.substr(colon + 1));
        if (section_indent == 0 || indent == section_indent) {
            section_indent = indent;
            ini += fmt::format("[{}]\n", key);
        } else {
            ini += fmt::format("{} = {}\n", key, value);
        }
    }
    if (!inside) throw ConfigError("manifest has no config: block");
    return parse_config(ini);
}

}  // namespace kslimit
