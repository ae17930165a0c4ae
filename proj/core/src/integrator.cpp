#include "mkvnoise/integrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace mkvnoise {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void apply_boundary(RowMatrix& x, const Box& box, BoundaryPolicy policy) {
  if (policy == BoundaryPolicy::None) return;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      double& v = x(i, j);
      const double lo = box.low[j];
      const double hi = box.high[j];
      if (policy == BoundaryPolicy::Reflect) {
        if (v > hi) v = 2.0 * hi - v;
        else if (v < lo) v = 2.0 * lo - v;
      }
      v = std::clamp(v, lo, hi);
    }
  }
}

}  // namespace

void validate(const NoiseSpec& spec) {
  std::visit(overloaded{
                 [](const NoNoise&) {},
                 [](const SmdSpec& s) { validate(s); },
                 [](const GcnSpec& s) { validate(s); },
             },
             spec);
}

RunStreams RunStreams::from_seed(std::uint64_t seed, std::uint64_t stream_id) {
  const RngStream root(seed, stream_id);
  return {root.substream(StreamPurpose::Initialization),
          root.substream(StreamPurpose::ParticleNoise),
          root.substream(StreamPurpose::CommonNoise)};
}

EulerStepper::EulerStepper(const Objective& objective, DynamicsSpec dynamics, NoiseSpec noise,
                           BoundaryPolicy boundary)
    : objective_(objective),
      dynamics_(std::move(dynamics)),
      noise_(std::move(noise)),
      boundary_(boundary),
      particle_diffusion_(has_particle_diffusion(dynamics_)) {
  validate(dynamics_);
  validate(noise_);
}

StepStats EulerStepper::step(ParticleCloud& cloud, double dt, RunStreams& streams,
                             std::size_t iteration, std::optional<Vector>& fvals) {
  if (!(dt > 0.0)) throw InvalidInput("euler step needs dt > 0");
  const Index n = cloud.size();
  const Index d = cloud.dim();
  const double sdt = std::sqrt(dt);
  StepStats stats;

  // Everything measure-dependent is frozen from X_n before any particle moves.
  const StepSnapshot snap = make_snapshot(dynamics_, cloud, objective_, std::move(fvals));
  fvals.reset();

  next_ = cloud.positions();
  if (particle_diffusion_) {
    xi_.resize(n, d);
    streams.particle.fill_normal(xi_);
  }
  for (Index i = 0; i < n; ++i) {
    const ParticleCoefficients c = baseline_coefficients(dynamics_, i, snap);
    next_.row(i) += dt * c.drift.transpose();
    if (particle_diffusion_ && c.diffusion_scale != 0.0)
      next_.row(i) += (sdt * c.diffusion_scale) * xi_.row(i);
  }

  std::visit(overloaded{
                 [](const NoNoise&) {},
                 [&](const SmdSpec& spec) {
                   if (spec.beta == 0.0) return;
                   Vector zeta(noise_dimension(spec.observable, d));
                   streams.common.fill_normal(zeta);
                   common_.resize(n, d);
                   stats.clamped_moments = smd_displacement(cloud, spec, dt, zeta, common_);
                   next_ += common_;
                 },
                 [&](const GcnSpec& spec) {
                   if (spec.beta == 0.0) return;
                   if (gcn_factor_.empty() ||
                       gcn_age_ % static_cast<std::size_t>(spec.sqrt_refresh_every) == 0)
                     gcn_factor_ = GcnFactor(cloud, spec);
                   ++gcn_age_;
                   common_.resize(n, d);
                   streams.common.fill_normal(common_);
                   next_ += gcn_factor_.apply(common_, sdt * spec.beta);
                 },
             },
             noise_);

  if (!next_.allFinite()) {
    throw DivergedError("particle system diverged at iteration " + std::to_string(iteration),
                        iteration);
  }
  apply_boundary(next_, objective_.domain(), boundary_);
  cloud.mutable_positions() = next_;
  fvals = objective_.values(cloud);
  return stats;
}

StepStats euler_step(ParticleCloud& cloud, const Objective& objective, const DynamicsSpec& dynamics,
                     const NoiseSpec& noise, double dt, RunStreams& streams,
                     BoundaryPolicy boundary, std::size_t iteration) {
  EulerStepper stepper(objective, dynamics, noise, boundary);
  std::optional<Vector> fvals;
  return stepper.step(cloud, dt, streams, iteration, fvals);
}

void validate(const RunConfig& config) {
  validate(config.dynamics);
  validate(config.noise);
  if (config.n_particles < 1) throw ConfigError("n_particles must be >= 1");
  if (config.record_stride < 1) throw ConfigError("record_stride must be >= 1");
  if (config.dim < 1) throw ConfigError("dim must be >= 1");
}

RunTrace run(const RunConfig& config) {
  validate(config);
  const Objective objective = make_objective(config.objective, config.dim, config.objective_options);
  return run(config, objective);
}

RunTrace run(const RunConfig& config, const Objective& objective) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();

  RunStreams streams = RunStreams::from_seed(config.seed, config.stream_id);
  ParticleCloud cloud = init_cloud(config.n_particles, objective, streams.init);
  EulerStepper stepper(objective, config.dynamics, config.noise, config.boundary);

  RunTrace trace;
  std::optional<Vector> fvals = objective.values(cloud);
  Index argmin = 0;
  double best = fvals->minCoeff(&argmin);
  trace.final_best_location = cloud.particle(argmin).transpose();
  trace.iterations.push_back(0);
  trace.best_values.push_back(best);

  const std::size_t n_iters = config.schedule.n_iters();
  const auto stride = static_cast<std::size_t>(config.record_stride);
  for (std::size_t it = 1; it <= n_iters; ++it) {
    try {
      trace.clamped_moments +=
          stepper.step(cloud, config.schedule.dt(it - 1), streams, it, fvals).clamped_moments;
    } catch (const DivergedError& e) {
      trace.final_best = best;
      trace.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      throw RunDiverged(e, std::move(trace));
    }
    const double step_best = fvals->minCoeff(&argmin);
    if (step_best < best) {
      best = step_best;
      trace.final_best_location = cloud.particle(argmin).transpose();
    }
    if (it % stride == 0 || it == n_iters) {
      trace.iterations.push_back(it);
      trace.best_values.push_back(best);
    }
  }
  trace.final_best = best;
  trace.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

}  // namespace mkvnoise
