#pragma once

// Reads a results directory back (manifest + traces) and builds the
// per-dynamics comparison tables and convergence-curve data.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mkvnoise/stats.hpp"
#include "trace_io.hpp"

namespace mkvnoise::harness {

struct ResultBenchmark {
  std::string name;
  std::string display_name;
  std::string slug;
  double known_min = 0.0;
};

struct ResultMethod {
  std::string name;
  std::string slug;
  std::string group;
  bool vanilla = false;
};

struct LoadedResults {
  nlohmann::json manifest;
  std::vector<ResultBenchmark> benchmarks;
  std::vector<ResultMethod> methods;
  std::size_t n_runs = 0;
  bool one_sided = false;
  // Indexed [method][benchmark][run].
  std::vector<std::vector<std::vector<TraceData>>> traces;
  std::vector<std::vector<std::vector<bool>>> diverged;
};

/// Throws HarnessError(kExitMissingTraces) listing every absent trace.
LoadedResults load_results(const std::filesystem::path& dir);

struct GroupTable {
  std::string group;
  std::vector<std::size_t> methods;    // indices into LoadedResults::methods
  std::optional<std::size_t> vanilla;  // position within `methods`
  std::vector<MethodResults> results;  // final_best of non-diverged runs
  std::vector<std::vector<double>> means;  // [benchmark][method]
  std::vector<std::size_t> best;           // per benchmark, position within `methods`
  std::vector<SignificanceCell> significance;  // empty without a vanilla method
  std::vector<double> avg_rank;
  std::vector<double> ecr;
  std::vector<std::size_t> diverged;  // per method, over all benchmarks
};

inline constexpr double kSignificanceLevel = 0.05;

std::vector<GroupTable> build_tables(const LoadedResults& results);

/// Human-readable tables, one per dynamics group.
std::string format_tables(const LoadedResults& results, const std::vector<GroupTable>& tables);

/// Long-format CSV: group,row,method,value,best,max_p,significant.
std::string tables_csv(const LoadedResults& results, const std::vector<GroupTable>& tables);

/// iteration, then <method>_mean,<method>_std per method (sample standard
/// deviation over non-diverged runs). benchmark and methods accept slugs or
/// names. Throws HarnessError(kExitGridMismatch) when iteration grids differ
/// and HarnessError(kExitConfig) for unknown names.
std::string plot_data_csv(const LoadedResults& results, const std::string& benchmark,
                          const std::vector<std::string>& methods);

}  // namespace mkvnoise::harness
