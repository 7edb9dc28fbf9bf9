#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "etsmc/engine.hpp"

namespace etsmc {

/// Significant digits used for CSV numbers. Defaults to 17 (lossless double
/// round-trip); the ETSMC_CSV_PRECISION environment variable overrides it.
int csv_precision();

/// One double as decimal text at the given precision.
std::string format_double(double v, int precision);

/// Write trajectory.csv, events.csv and diagnostics.csv into out_dir
/// (created if missing). Output is deterministic: a fixed run yields
/// byte-identical files. Returns the paths written.
std::vector<std::filesystem::path> emit_csv(const RunResult& result,
                                            const std::filesystem::path& out_dir);

}  // namespace etsmc
