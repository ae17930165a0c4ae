#pragma once

// Experiment configuration: a JSON document describing a benchmark list and
// a method grid. See README.md for the schema.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mkvnoise/integrator.hpp"

namespace mkvnoise::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitMissingTraces = 4;
inline constexpr int kExitGridMismatch = 5;

/// Error that maps onto a process exit status.
class HarnessError : public Error {
 public:
  HarnessError(const std::string& what, int exit_code) : Error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

struct BenchmarkSpec {
  std::string name;  // canonical registry key
  std::string display_name;
  std::string slug;
  Index dim = 20;
  bool normalize_by_dim = false;
  double known_min_value = 0.0;
};

struct MethodSpec {
  std::string name;   // e.g. "SMD-CBO Mean+Var"
  std::string slug;   // directory name
  std::string group;  // dynamics label the method is reported under
  bool vanilla = false;
  DynamicsSpec dynamics;
  NoiseSpec noise;
  nlohmann::json dynamics_json;
  nlohmann::json noise_json;
};

enum class Sidedness { TwoSided, OneSided };

struct ExperimentConfig {
  std::vector<BenchmarkSpec> benchmarks;
  std::vector<MethodSpec> methods;
  Index n_particles = 150;
  std::size_t n_iters = 300;
  double dt = StepSchedule::kDefaultDt;
  std::size_t n_runs = 50;
  std::uint64_t base_seed = 0;
  Index record_stride = 1;
  std::filesystem::path output = "results";
  Sidedness sidedness = Sidedness::TwoSided;
  BoundaryPolicy boundary = BoundaryPolicy::Clamp;
  /// Fraction of diverged runs tolerated before `run` exits with status 3.
  double max_diverged_fraction = 0.0;
  /// Free-form object copied verbatim into the manifest.
  nlohmann::json annotations = nlohmann::json::object();
};

/// Throws HarnessError with kExitConfig on any schema violation.
ExperimentConfig parse_experiment(const nlohmann::json& doc);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Fully resolved configuration (defaults filled in, grids expanded).
nlohmann::json to_json(const ExperimentConfig& config);

/// Run r of every method uses seed base_seed + r.
std::uint64_t run_seed(const ExperimentConfig& config, std::size_t run);

RunConfig make_run_config(const ExperimentConfig& config, const MethodSpec& method,
                          const BenchmarkSpec& benchmark, std::size_t run);

DynamicsSpec parse_dynamics(const nlohmann::json& doc);
NoiseSpec parse_noise(const nlohmann::json& doc);

std::string slugify(std::string_view text);
std::string_view boundary_name(BoundaryPolicy policy);

}  // namespace mkvnoise::harness
