#pragma once

// Shared particle-system types and empirical moments.

#include <Eigen/Core>

#include <cstddef>
#include <vector>

#include "mkvnoise/errors.hpp"

namespace mkvnoise {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// N x d layout: one particle per row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// N particle positions in R^d. The shape is fixed at construction; only
/// coordinate values may change afterwards.
class ParticleCloud {
 public:
  ParticleCloud(Index n_particles, Index dim);
  explicit ParticleCloud(RowMatrix positions);

  Index size() const noexcept { return positions_.rows(); }
  Index dim() const noexcept { return positions_.cols(); }

  const RowMatrix& positions() const noexcept { return positions_; }
  /// Writable view that cannot resize the underlying storage.
  Eigen::Map<RowMatrix> mutable_positions() noexcept {
    return {positions_.data(), positions_.rows(), positions_.cols()};
  }

  auto particle(Index i) const { return positions_.row(i); }

  bool all_finite() const { return positions_.allFinite(); }

 private:
  RowMatrix positions_;
};

/// Per-coordinate moments of the empirical measure (population convention).
struct EmpiricalMoments {
  Vector mean;
  Vector second_moment;
  Vector variance;
};

EmpiricalMoments compute_moments(const ParticleCloud& cloud);

/// Sequence of positive step sizes.
class StepSchedule {
 public:
  static constexpr double kDefaultDt = 0.1;

  StepSchedule() = default;
  explicit StepSchedule(std::vector<double> steps);
  static StepSchedule constant(double dt, std::size_t n_iters);

  std::size_t n_iters() const noexcept { return steps_.size(); }
  double dt(std::size_t n) const { return steps_.at(n); }
  const std::vector<double>& steps() const noexcept { return steps_; }

 private:
  std::vector<double> steps_;
};

class Objective;
class RngStream;

/// Draws every coordinate i.i.d. uniform over the objective's domain box.
ParticleCloud init_cloud(Index n, const Objective& objective, RngStream& rng);

}  // namespace mkvnoise
