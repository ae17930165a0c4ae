#pragma once

// Grid execution: every (method, benchmark, run) triple, parallel up to a
// job bound, one trace file per triple plus a manifest.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include <json.hpp>

#include "config.hpp"

namespace mkvnoise::harness {

struct RunStatus {
  std::size_t method = 0;
  std::size_t benchmark = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> diverged_iteration;
};

struct ExperimentSummary {
  std::size_t total_runs = 0;
  std::size_t diverged_runs = 0;
  std::vector<RunStatus> runs;  // method-major, then benchmark, then run
  int exit_status = kExitOk;
};

inline constexpr const char* kManifestName = "manifest.json";

/// Executes the grid into config.output. jobs = 0 picks the hardware
/// concurrency. Traces of diverged runs hold the steps completed before the
/// failure. Progress lines go to log when given.
ExperimentSummary run_experiment(const ExperimentConfig& config, unsigned jobs,
                                 std::ostream* log = nullptr);

nlohmann::json make_manifest(const ExperimentConfig& config, const ExperimentSummary& summary);

}  // namespace mkvnoise::harness
