#include "mkvnoise/core.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "mkvnoise/objectives.hpp"
#include "mkvnoise/rng.hpp"

namespace mkvnoise {

ParticleCloud::ParticleCloud(Index n_particles, Index dim) {
  if (n_particles < 1 || dim < 1)
    throw InvalidInput("particle cloud needs N >= 1 and d >= 1");
  positions_ = RowMatrix::Zero(n_particles, dim);
}

ParticleCloud::ParticleCloud(RowMatrix positions) : positions_(std::move(positions)) {
  if (positions_.rows() < 1 || positions_.cols() < 1)
    throw InvalidInput("particle cloud needs N >= 1 and d >= 1");
}

EmpiricalMoments compute_moments(const ParticleCloud& cloud) {
  const auto& x = cloud.positions();
  const double inv_n = 1.0 / static_cast<double>(x.rows());

  EmpiricalMoments m;
  m.mean = x.colwise().sum().transpose() * inv_n;
  m.second_moment = x.array().square().colwise().sum().transpose() * inv_n;
  // Centred second pass: agrees with m2 - mean^2 up to rounding but keeps
  // full relative precision when the cloud is concentrated far from 0.
  m.variance = (x.rowwise() - m.mean.transpose()).array().square().colwise().sum().transpose() *
               inv_n;
  m.variance = m.variance.cwiseMax(0.0);
  return m;
}

StepSchedule::StepSchedule(std::vector<double> steps) : steps_(std::move(steps)) {
  for (double dt : steps_) {
    if (!(dt > 0.0)) throw InvalidInput("step sizes must be positive, got " + std::to_string(dt));
  }
}

StepSchedule StepSchedule::constant(double dt, std::size_t n_iters) {
  return StepSchedule(std::vector<double>(n_iters, dt));
}

ParticleCloud init_cloud(Index n, const Objective& objective, RngStream& rng) {
  if (n < 1) throw InvalidInput("init_cloud needs n >= 1");
  const Box& box = objective.domain();
  for (Index j = 0; j < box.dim(); ++j) {
    if (!(box.low[j] < box.high[j]))
      throw InvalidInput("degenerate domain box in coordinate " + std::to_string(j));
  }
  RowMatrix x(n, box.dim());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < box.dim(); ++j) x(i, j) = rng.uniform(box.low[j], box.high[j]);
  return ParticleCloud(std::move(x));
}

}  // namespace mkvnoise
