#include "mkvnoise/dynamics.hpp"

#include <algorithm>
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

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void validate(const DynamicsSpec& spec) {
  std::visit(overloaded{
                 [](const MsgdConfig&) {},
                 [](const LangevinConfig& c) { require(c.kappa > 0.0, "Langevin kappa must be > 0"); },
                 [](const CboConfig& c) {
                   require(c.lambda > 0.0, "CBO lambda must be > 0");
                   require(c.gamma >= 0.0, "CBO gamma must be >= 0");
                   require(c.alpha > 0.0, "CBO alpha must be > 0");
                   require(c.heaviside_eps > 0.0, "CBO heaviside_eps must be > 0");
                 },
                 [](const SbsConfig& c) {
                   require(c.kappa > 0.0, "SBS kappa must be > 0");
                   require(!c.bandwidth || *c.bandwidth > 0.0, "SBS bandwidth must be > 0");
                 },
                 [](const CustomDynamics& c) {
                   require(static_cast<bool>(c.coefficients), "custom dynamics has no callback");
                 },
             },
             spec);
}

std::string_view family_name(const DynamicsSpec& spec) {
  return std::visit(overloaded{
                        [](const MsgdConfig&) { return std::string_view("MSGD"); },
                        [](const LangevinConfig&) { return std::string_view("Langevin"); },
                        [](const CboConfig&) { return std::string_view("CBO"); },
                        [](const SbsConfig&) { return std::string_view("SBS"); },
                        [](const CustomDynamics&) { return std::string_view("Custom"); },
                    },
                    spec);
}

bool has_particle_diffusion(const DynamicsSpec& spec) {
  return std::visit(overloaded{
                        [](const LangevinConfig&) { return true; },
                        [](const CboConfig& c) { return c.gamma > 0.0; },
                        [](const CustomDynamics& c) { return c.has_diffusion; },
                        [](const auto&) { return false; },
                    },
                    spec);
}

KernelEval gaussian_kernel(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                           double sigma) {
  const double value = std::exp(-(x - y).squaredNorm() / sigma);
  return {value, (-2.0 / sigma * value) * (x - y)};
}

Vector cbo_consensus(const ParticleCloud& cloud, std::span<const double> fvals, double alpha) {
  if (static_cast<Index>(fvals.size()) != cloud.size())
    throw InvalidInput("cbo_consensus: one objective value per particle required");
  const double fmin = *std::min_element(fvals.begin(), fvals.end());
  Vector weighted = Vector::Zero(cloud.dim());
  double total = 0.0;
  for (Index i = 0; i < cloud.size(); ++i) {
    const double w = std::exp(-alpha * (fvals[static_cast<std::size_t>(i)] - fmin));
    weighted += w * cloud.particle(i).transpose();
    total += w;
  }
  return weighted / total;
}

double smooth_heaviside(double z, double eps) {
  const double t = z / eps;
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

ParticleCoefficients cbo_coefficients(const Eigen::Ref<const Vector>& x, double fx,
                                      const Eigen::Ref<const Vector>& consensus,
                                      double f_consensus, const CboConfig& cfg) {
  const Vector diff = x - consensus;
  const double h = smooth_heaviside(fx - f_consensus, cfg.heaviside_eps);
  return {(-cfg.lambda * h) * diff, cfg.gamma * diff.norm()};
}

ParticleCoefficients cbo_coefficients(const Eigen::Ref<const Vector>& x, const ParticleCloud& cloud,
                                      std::span<const double> fvals, const Objective& objective,
                                      const CboConfig& cfg) {
  const Vector v = cbo_consensus(cloud, fvals, cfg.alpha);
  return cbo_coefficients(x, objective.value(x), v, objective.value(v), cfg);
}

Vector sbs_drift(const Eigen::Ref<const Vector>& x, const ParticleCloud& cloud,
                 const RowMatrix& grads, double kappa, double bandwidth) {
  Vector acc = Vector::Zero(x.size());
  for (Index i = 0; i < cloud.size(); ++i) {
    const auto xi = cloud.particle(i).transpose();
    const double k = std::exp(-(x - xi).squaredNorm() / bandwidth);
    if (k == 0.0) continue;
    // Repulsion: gradient of k(x, x_i) in the sampled point x_i, which for
    // the Gaussian kernel is (2/sigma)(x - x_i) k and pushes x away from x_i.
    acc += -k * grads.row(i).transpose() + (kappa * 2.0 / bandwidth * k) * (x - xi);
  }
  return acc / static_cast<double>(cloud.size());
}

Vector sbs_drift(const Eigen::Ref<const Vector>& x, const ParticleCloud& cloud,
                 const RowMatrix& grads, const SbsConfig& cfg) {
  return sbs_drift(x, cloud, grads, cfg.kappa, resolved_sbs_bandwidth(cfg, cloud.size()));
}

double resolved_sbs_bandwidth(const SbsConfig& cfg, Index n_particles) {
  if (cfg.bandwidth) return *cfg.bandwidth;
  const double n = static_cast<double>(n_particles);
  return 1.0 / (n * n);
}

StepSnapshot make_snapshot(const DynamicsSpec& spec, const ParticleCloud& cloud,
                           const Objective& objective, std::optional<Vector> fvals) {
  StepSnapshot snap;
  snap.cloud = &cloud;
  snap.objective = &objective;
  snap.fvals = fvals ? std::move(*fvals) : objective.values(cloud);
  if (snap.fvals.size() != cloud.size())
    throw InvalidInput("snapshot: one objective value per particle required");

  std::visit(overloaded{
                 [&](const MsgdConfig&) { snap.grads = objective.gradients(cloud); },
                 [&](const LangevinConfig&) { snap.grads = objective.gradients(cloud); },
                 [&](const CboConfig& c) {
                   snap.consensus = cbo_consensus(
                       cloud, {snap.fvals.data(), static_cast<std::size_t>(snap.fvals.size())},
                       c.alpha);
                   snap.consensus_value = objective.value(snap.consensus);
                 },
                 [&](const SbsConfig& c) {
                   snap.grads = objective.gradients(cloud);
                   snap.sbs_bandwidth = resolved_sbs_bandwidth(c, cloud.size());
                 },
                 [&](const CustomDynamics& c) {
                   if (c.needs_gradients) snap.grads = objective.gradients(cloud);
                 },
             },
             spec);
  return snap;
}

ParticleCoefficients baseline_coefficients(const DynamicsSpec& spec, Index particle,
                                           const StepSnapshot& snap) {
  const auto x = snap.cloud->particle(particle).transpose();
  return std::visit(
      overloaded{
          [&](const MsgdConfig&) {
            return ParticleCoefficients{-snap.grads.row(particle).transpose(), 0.0};
          },
          [&](const LangevinConfig& c) {
            return ParticleCoefficients{-snap.grads.row(particle).transpose(),
                                        std::sqrt(2.0 * c.kappa)};
          },
          [&](const CboConfig& c) {
            return cbo_coefficients(x, snap.fvals[particle], snap.consensus, snap.consensus_value,
                                    c);
          },
          [&](const SbsConfig& c) {
            return ParticleCoefficients{sbs_drift(x, *snap.cloud, snap.grads, c.kappa,
                                                  snap.sbs_bandwidth),
                                        0.0};
          },
          [&](const CustomDynamics& c) { return c.coefficients(particle, snap); },
      },
      spec);
}

}  // namespace mkvnoise
