#pragma once

// Baseline McKean-Vlasov drift/diffusion families and the Gaussian kernel
// they share.

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "mkvnoise/core.hpp"
#include "mkvnoise/objectives.hpp"

namespace mkvnoise {

/// Multi-start gradient descent: (b, sigma) = (-grad V, 0).
struct MsgdConfig {};

/// Overdamped Langevin: (b, sigma) = (-grad V, sqrt(2 kappa) I).
struct LangevinConfig {
  double kappa = 1.0;
};

/// Consensus-based optimisation (isotropic).
struct CboConfig {
  double lambda = 1.0;         // drift gain
  double gamma = 5.1;          // diffusion gain
  double alpha = 1.0;          // Gibbs weight of the consensus point
  double heaviside_eps = 1e-2; // width of the smoothed Heaviside
};

/// Stein Boltzmann sampling (SVGD drift, no diffusion).
struct SbsConfig {
  double kappa = 1.0;
  /// Gaussian kernel bandwidth; 1/N^2 when unset.
  std::optional<double> bandwidth;
};

struct StepSnapshot;

/// Drift and isotropic diffusion scale of one particle: the particle's
/// Brownian increment is multiplied by diffusion_scale.
struct ParticleCoefficients {
  Vector drift;
  double diffusion_scale = 0.0;
};

/// User-supplied family evaluated against the frozen pre-step snapshot.
struct CustomDynamics {
  std::function<ParticleCoefficients(Index particle, const StepSnapshot&)> coefficients;
  bool needs_values = false;
  bool needs_gradients = false;
  bool has_diffusion = false;
};

using DynamicsSpec = std::variant<MsgdConfig, LangevinConfig, CboConfig, SbsConfig, CustomDynamics>;

/// Throws ConfigError when a hyperparameter is out of range.
void validate(const DynamicsSpec& spec);
std::string_view family_name(const DynamicsSpec& spec);
/// True when the family injects per-particle Brownian noise.
bool has_particle_diffusion(const DynamicsSpec& spec);

struct KernelEval {
  double value;
  Vector grad_x;
};

/// k(x, y) = exp(-|x - y|^2 / sigma) and its gradient in x.
KernelEval gaussian_kernel(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                           double sigma);

/// Gibbs-weighted mean of the cloud, weights exp(-alpha (f_i - min f)).
Vector cbo_consensus(const ParticleCloud& cloud, std::span<const double> fvals, double alpha);

/// Logistic smoothing 1 / (1 + exp(-z / eps)).
double smooth_heaviside(double z, double eps);

/// CBO coefficients given a precomputed consensus point v and f(v).
ParticleCoefficients cbo_coefficients(const Eigen::Ref<const Vector>& x, double fx,
                                      const Eigen::Ref<const Vector>& consensus,
                                      double f_consensus, const CboConfig& cfg);

/// Convenience form computing the consensus point from the cloud.
ParticleCoefficients cbo_coefficients(const Eigen::Ref<const Vector>& x, const ParticleCloud& cloud,
                                      std::span<const double> fvals, const Objective& objective,
                                      const CboConfig& cfg);

/// (1/N) sum_i [ -k(x, x_i) grad V(x_i) + kappa grad_x k(x, x_i) ].
/// grads holds grad V(x_i) row-wise; bandwidth must be resolved.
Vector sbs_drift(const Eigen::Ref<const Vector>& x, const ParticleCloud& cloud,
                 const RowMatrix& grads, double kappa, double bandwidth);

Vector sbs_drift(const Eigen::Ref<const Vector>& x, const ParticleCloud& cloud,
                 const RowMatrix& grads, const SbsConfig& cfg);

double resolved_sbs_bandwidth(const SbsConfig& cfg, Index n_particles);

/// Measure-dependent quantities computed once from X_n before any particle
/// moves. Only the fields required by the family are filled.
struct StepSnapshot {
  const ParticleCloud* cloud = nullptr;
  const Objective* objective = nullptr;
  Vector fvals;
  RowMatrix grads;
  Vector consensus;
  double consensus_value = 0.0;
  double sbs_bandwidth = 0.0;
};

/// Builds the snapshot. If fvals is non-empty it must hold f at every
/// particle of cloud and is reused instead of re-evaluating.
StepSnapshot make_snapshot(const DynamicsSpec& spec, const ParticleCloud& cloud,
                           const Objective& objective, std::optional<Vector> fvals = {});

ParticleCoefficients baseline_coefficients(const DynamicsSpec& spec, Index particle,
                                           const StepSnapshot& snapshot);

}  // namespace mkvnoise
