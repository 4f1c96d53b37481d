#include "kslimit/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "kslimit/config.hpp"

namespace kslimit::io {

namespace {

double to_double(const std::string& s, const std::string& where) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::runtime_error(fmt::format("{}: '{}' is not a number", where, s));
    }
    return x;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records) {
    std::string out = std::string(kDiagnosticsHeader) + "\n";
    for (const DiagnosticsRecord& r : records) {
        out += fmt::format("{},{},{},{},{},{}\n", format_double(r.t), format_double(r.mass),
                           format_double(r.min_v), format_double(r.max_u), format_double(r.w1q_v),
                           format_double(r.lyapunov));
    }
    return out;
}

std::string sweep_csv(const SweepResult& result) {
    std::string out = std::string(kSweepHeader) + "\n";
    for (const LambdaErrors& le : result.per_lambda) {
        for (const ErrorSample& s : le.samples) {
            out += fmt::format("{},{},{},{},{},{}\n", format_double(le.lambda), format_double(s.t),
                               format_double(s.err_u_linf), format_double(s.err_u_l2),
                               format_double(s.err_v_linf), format_double(s.err_v_l2));
        }
    }
    return out;
}

std::string summary_csv(const SweepResult& result) {
    std::string out = std::string(kSummaryHeader) + "\n";
    for (const LambdaErrors& le : result.per_lambda) {
        out += fmt::format("{},{},{},{}\n", format_double(le.lambda), format_double(le.e_u),
                           format_double(le.e_v), format_double(le.runtime_seconds));
    }
    return out;
}

std::vector<std::vector<double>> parse_csv(const std::string& text, const std::string& expected_header) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
    line = strip_cr(line);
    if (line != expected_header) {
        throw std::runtime_error(
            fmt::format("csv: header '{}' does not match expected '{}'", line, expected_header));
    }
    const auto columns =
        static_cast<std::size_t>(std::count(expected_header.begin(), expected_header.end(), ',')) + 1;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(to_double(cell, fmt::format("csv line {}", line_no)));
        }
        if (row.size() != columns) {
            throw std::runtime_error(
                fmt::format("csv line {}: {} columns, expected {}", line_no, row.size(), columns));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string snapshot_text(const Snapshot& snap) {
    const Grid& g = snap.u.grid();
    std::string out;
    out += fmt::format("t: {}\n", format_double(snap.t));
    out += fmt::format("dim: {}\n", g.dim());
    if (g.dim() == 1) {
        out += fmt::format("cells: {}\n", g.nx());
        out += fmt::format("extent: {}\n", format_double(g.lx()));
        out += fmt::format("spacing: {}\n", format_double(g.hx()));
    } else {
        out += fmt::format("cells: {}, {}\n", g.nx(), g.ny());
        out += fmt::format("extent: {}, {}\n", format_double(g.lx()), format_double(g.ly()));
        out += fmt::format("spacing: {}, {}\n", format_double(g.hx()), format_double(g.hy()));
    }
    for (const auto& [name, field] : {std::pair{"u", &snap.u}, std::pair{"v", &snap.v}}) {
        out += fmt::format("field: {}\n", name);
        for (double x : field->values()) {
            out += format_double(x);
            out += '\n';
        }
    }
    return out;
}

Snapshot parse_snapshot(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto header = [&](const char* key) {
        if (!std::getline(in, line)) {
            throw std::runtime_error(fmt::format("snapshot: missing header '{}'", key));
        }
        line = strip_cr(line);
        const std::string prefix = std::string(key) + ": ";
        if (line.rfind(prefix, 0) != 0) {
            throw std::runtime_error(fmt::format("snapshot: expected '{}', got '{}'", prefix, line));
        }
        return line.substr(prefix.size());
    };
    auto numbers = [](const std::string& s, const char* key) {
        std::vector<double> xs;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto b = item.find_first_not_of(' ');
            xs.push_back(to_double(b == std::string::npos ? "" : item.substr(b), key));
        }
        return xs;
    };

    const double t = to_double(header("t"), "snapshot t");
    const int dim = static_cast<int>(to_double(header("dim"), "snapshot dim"));
    const std::vector<double> cells = numbers(header("cells"), "snapshot cells");
    const std::vector<double> extent = numbers(header("extent"), "snapshot extent");
    header("spacing");
    if ((dim != 1 && dim != 2) || cells.size() != static_cast<std::size_t>(dim) ||
        extent.size() != static_cast<std::size_t>(dim)) {
        throw std::runtime_error("snapshot: inconsistent dim/cells/extent header");
    }
    const Grid g = dim == 1 ? Grid::line(extent[0], static_cast<int>(cells[0]))
                            : Grid::box(extent[0], extent[1], static_cast<int>(cells[0]),
                                        static_cast<int>(cells[1]));

    auto section = [&](const char* name) {
        if (header("field") != name) {
            throw std::runtime_error(fmt::format("snapshot: expected field section '{}'", name));
        }
        std::vector<double> values;
        values.reserve(g.size());
        for (std::size_t c = 0; c < g.size(); ++c) {
            if (!std::getline(in, line)) {
                throw std::runtime_error(fmt::format(
                    "snapshot: field '{}' has {} values, expected {}", name, c, g.size()));
            }
            values.push_back(to_double(strip_cr(line), fmt::format("snapshot field {}", name)));
        }
        return Field(g, std::move(values));
    };
    Field u = section("u");
    Field v = section("v");
    while (std::getline(in, line)) {
        if (!strip_cr(line).empty()) throw std::runtime_error("snapshot: trailing data after field v");
    }
    return {t, std::move(u), std::move(v)};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
    out << text;
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot open '{}' for reading", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace kslimit::io
