#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kslimit/dynamics.hpp"
#include "kslimit/experiments.hpp"

namespace kslimit::io {

inline constexpr const char* kDiagnosticsHeader = "t,mass,min_v,max_u,w1q_v,lyapunov";
inline constexpr const char* kSweepHeader = "lambda,t,err_u_linf,err_u_l2,err_v_linf,err_v_l2";
inline constexpr const char* kSummaryHeader = "lambda,E_u,E_v,runtime_seconds";

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records);
std::string sweep_csv(const SweepResult& result);
std::string summary_csv(const SweepResult& result);

/// Rows of a CSV whose header must equal `expected_header` exactly; every
/// cell must parse as a number. Throws std::runtime_error naming the problem.
std::vector<std::vector<double>> parse_csv(const std::string& text, const std::string& expected_header);

/// Snapshot text: `key: value` header lines (t, dim, cells, extent, spacing),
/// then `field: u` and `field: v` sections with one value per line in
/// row-major cell order.
std::string snapshot_text(const Snapshot& snap);

Snapshot parse_snapshot(const std::string& text);

/// Writes text to path, throwing std::runtime_error on failure.
void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

}  // namespace kslimit::io
