#pragma once

// Euler-Maruyama stepping of a baseline family plus at most one rho-noise
// plug-in, and the seeded run loop with best-value tracking.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mkvnoise/core.hpp"
#include "mkvnoise/dynamics.hpp"
#include "mkvnoise/gcn.hpp"
#include "mkvnoise/objectives.hpp"
#include "mkvnoise/rng.hpp"
#include "mkvnoise/smd.hpp"

namespace mkvnoise {

struct NoNoise {};

/// At most one plug-in per run; SMD and GCN do not stack.
using NoiseSpec = std::variant<NoNoise, SmdSpec, GcnSpec>;

void validate(const NoiseSpec& spec);

enum class BoundaryPolicy {
  Clamp,    // project onto the domain box
  Reflect,  // mirror once at the violated face, then project
  None,
};

/// Per-run random streams, one per purpose.
struct RunStreams {
  RngStream init;
  RngStream particle;
  RngStream common;

  static RunStreams from_seed(std::uint64_t seed, std::uint64_t stream_id = 0);
};

struct StepStats {
  Index clamped_moments = 0;
};

/// Reusable stepping state: scratch buffers and the cached GCN factor.
class EulerStepper {
 public:
  EulerStepper(const Objective& objective, DynamicsSpec dynamics, NoiseSpec noise,
               BoundaryPolicy boundary = BoundaryPolicy::Clamp);

  /// Advances the cloud by one step of size dt. fvals may carry f at the
  /// current positions; on return it holds f at the new positions.
  /// Throws DivergedError (with iteration) on a non-finite update.
  StepStats step(ParticleCloud& cloud, double dt, RunStreams& streams, std::size_t iteration,
                 std::optional<Vector>& fvals);

 private:
  const Objective& objective_;
  DynamicsSpec dynamics_;
  NoiseSpec noise_;
  BoundaryPolicy boundary_;
  bool particle_diffusion_;
  GcnFactor gcn_factor_;
  std::size_t gcn_age_ = 0;
  RowMatrix next_;
  RowMatrix xi_;
  RowMatrix common_;
};

/// One step without cached state.
StepStats euler_step(ParticleCloud& cloud, const Objective& objective, const DynamicsSpec& dynamics,
                     const NoiseSpec& noise, double dt, RunStreams& streams,
                     BoundaryPolicy boundary = BoundaryPolicy::Clamp, std::size_t iteration = 0);

struct RunConfig {
  std::string objective = "ackley";
  Index dim = 20;
  ObjectiveOptions objective_options;
  DynamicsSpec dynamics = CboConfig{};
  NoiseSpec noise = NoNoise{};
  Index n_particles = 150;
  StepSchedule schedule = StepSchedule::constant(StepSchedule::kDefaultDt, 300);
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  Index record_stride = 1;
  BoundaryPolicy boundary = BoundaryPolicy::Clamp;
};

void validate(const RunConfig& config);

struct RunTrace {
  std::vector<std::size_t> iterations;  // recorded iteration indices
  std::vector<double> best_values;      // running minimum, non-increasing
  double final_best = 0.0;
  Vector final_best_location;
  double wall_time = 0.0;  // seconds
  Index clamped_moments = 0;
};

/// Divergence inside run(); carries the trace recorded up to that point.
class RunDiverged : public DivergedError {
 public:
  RunDiverged(const DivergedError& cause, RunTrace partial)
      : DivergedError(cause), partial_(std::move(partial)) {}

  const RunTrace& partial_trace() const noexcept { return partial_; }

 private:
  RunTrace partial_;
};

/// Seeded run: init_cloud, then n_iters Euler steps. Throws RunDiverged.
RunTrace run(const RunConfig& config);
/// Same, against a caller-provided objective (config.objective and
/// config.dim are ignored).
RunTrace run(const RunConfig& config, const Objective& objective);

}  // namespace mkvnoise
