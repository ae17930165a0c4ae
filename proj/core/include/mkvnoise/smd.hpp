#pragma once

// Stochastic Moment Dynamics: common-noise forcing that makes a chosen
// empirical observable (mean, second moment, variance, or mean and variance)
// follow a prescribed SDE. The variance-type observables are driven towards
// a per-coordinate delta-Bessel process, which stays positive for delta >= 2.

#include <string_view>

#include "mkvnoise/core.hpp"

namespace mkvnoise {

enum class Observable { Mean, SecondMoment, Variance, MeanPlusVariance };

enum class SingularityPolicy {
  Clamp,  // raise the offending moment to the floor and count the event
  Abort,  // throw SingularityError
};

struct SmdSpec {
  static constexpr double kDefaultFloor = 1e-8;

  Observable observable = Observable::MeanPlusVariance;
  double delta = 2.0;  // Bessel index, >= 2
  double beta = 1.0;   // intensity, >= 0
  double floor = kDefaultFloor;
  SingularityPolicy policy = SingularityPolicy::Clamp;
};

void validate(const SmdSpec& spec);

std::string_view observable_name(Observable obs);

/// Dimension p of the common Brownian increment: d, or 2d for Mean+Var.
Index noise_dimension(Observable obs, Index dim);

/// Forcing coefficients at one point: b_tilde in R^d, sigma_tilde in R^{d x p}.
struct SmdCoefficients {
  Vector b_tilde;
  Matrix sigma_tilde;
};

/// Closed-form coefficients. Throws SingularityError (carrying the
/// coordinate) when the relevant moment is below spec.floor.
SmdCoefficients smd_coefficients(const Eigen::Ref<const Vector>& x, const EmpiricalMoments& moments,
                                 const SmdSpec& spec);

/// Applies spec.policy to the moments the observable divides by. Returns the
/// number of coordinates raised to the floor (always 0 under Abort, which
/// throws instead).
Index regularize_moments(EmpiricalMoments& moments, const SmdSpec& spec);

/// out[i] = dt beta b_tilde(x_i) + sqrt(dt) beta sigma_tilde(x_i) zeta, with
/// coefficients taken from the moments of the whole cloud and one zeta shared
/// by every particle. Returns the number of clamped coordinates.
Index smd_displacement(const ParticleCloud& cloud, const SmdSpec& spec, double dt,
                       const Eigen::Ref<const Vector>& zeta, Eigen::Ref<RowMatrix> out);

/// Same, with precomputed moments of the cloud.
Index smd_displacement(const ParticleCloud& cloud, EmpiricalMoments moments, const SmdSpec& spec,
                       double dt, const Eigen::Ref<const Vector>& zeta, Eigen::Ref<RowMatrix> out);

}  // namespace mkvnoise
