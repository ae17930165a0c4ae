#pragma once

// Per-run trace files: CSV with header "iteration,best_value", LF line
// endings and 17 significant digits.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mkvnoise/integrator.hpp"

namespace mkvnoise::harness {

struct TraceData {
  std::vector<std::size_t> iterations;
  std::vector<double> best_values;

  double final_best() const { return best_values.empty() ? 0.0 : best_values.back(); }
};

inline constexpr std::string_view kTraceHeader = "iteration,best_value";

/// "%.17g"; round-trips every finite double.
std::string format_double(double value);

std::string trace_csv(const std::vector<std::size_t>& iterations,
                      const std::vector<double>& best_values);

/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

void write_trace(const std::filesystem::path& path, const RunTrace& trace);

/// Throws HarnessError(kExitMissingTraces) when the file is absent or malformed.
TraceData read_trace(const std::filesystem::path& path);

/// <root>/traces/<method>/<benchmark>/run_NNNN.csv
std::filesystem::path trace_path(const std::filesystem::path& root, std::string_view method_slug,
                                 std::string_view benchmark_slug, std::size_t run);

}  // namespace mkvnoise::harness
