#include "mkvnoise/smd.hpp"

#include <cmath>
#include <string>

namespace mkvnoise {

namespace {

bool uses_variance(Observable obs) {
  return obs == Observable::Variance || obs == Observable::MeanPlusVariance;
}

void check_floor(const Vector& moment, double floor, const char* label) {
  for (Index j = 0; j < moment.size(); ++j) {
    if (!(moment[j] >= floor)) {
      throw SingularityError(std::string("SMD: ") + label + " of coordinate " + std::to_string(j) +
                                 " is " + std::to_string(moment[j]) + ", below floor " +
                                 std::to_string(floor),
                             j, moment[j]);
    }
  }
}

}  // namespace

void validate(const SmdSpec& spec) {
  if (!(spec.delta >= 2.0)) throw ConfigError("SMD delta must be >= 2");
  if (!(spec.beta >= 0.0)) throw ConfigError("SMD beta must be >= 0");
  if (!(spec.floor > 0.0)) throw ConfigError("SMD singularity floor must be > 0");
}

std::string_view observable_name(Observable obs) {
  switch (obs) {
    case Observable::Mean: return "Mean";
    case Observable::SecondMoment: return "M2";
    case Observable::Variance: return "Var";
    case Observable::MeanPlusVariance: return "Mean+Var";
  }
  return "?";
}

Index noise_dimension(Observable obs, Index dim) {
  return obs == Observable::MeanPlusVariance ? 2 * dim : dim;
}

SmdCoefficients smd_coefficients(const Eigen::Ref<const Vector>& x, const EmpiricalMoments& moments,
                                 const SmdSpec& spec) {
  const Index d = x.size();
  const Index p = noise_dimension(spec.observable, d);
  SmdCoefficients c{Vector::Zero(d), Matrix::Zero(d, p)};
  const double bessel = spec.delta - 1.5;

  switch (spec.observable) {
    case Observable::Mean:
      c.sigma_tilde.setIdentity();
      break;
    case Observable::SecondMoment: {
      check_floor(moments.second_moment, spec.floor, "second moment");
      const auto& m2 = moments.second_moment.array();
      c.b_tilde = bessel * x.array() / (4.0 * m2.square());
      c.sigma_tilde.diagonal() = x.array() / (2.0 * m2);
      break;
    }
    case Observable::Variance:
    case Observable::MeanPlusVariance: {
      check_floor(moments.variance, spec.floor, "variance");
      const auto& var = moments.variance.array();
      const Eigen::ArrayXd centred = x.array() - moments.mean.array();
      c.b_tilde = bessel * centred / (4.0 * var.square());
      if (spec.observable == Observable::Variance) {
        c.sigma_tilde.diagonal() = centred / (2.0 * var);
      } else {
        c.sigma_tilde.leftCols(d).setIdentity();
        c.sigma_tilde.rightCols(d).diagonal() = centred / (2.0 * var);
      }
      break;
    }
  }
  return c;
}

Index regularize_moments(EmpiricalMoments& moments, const SmdSpec& spec) {
  Vector* target = nullptr;
  const char* label = "";
  if (spec.observable == Observable::SecondMoment) {
    target = &moments.second_moment;
    label = "second moment";
  } else if (uses_variance(spec.observable)) {
    target = &moments.variance;
    label = "variance";
  }
  if (!target) return 0;
  if (spec.policy == SingularityPolicy::Abort) {
    check_floor(*target, spec.floor, label);
    return 0;
  }
  Index clamped = 0;
  for (Index j = 0; j < target->size(); ++j) {
    if (!((*target)[j] >= spec.floor)) {
      (*target)[j] = spec.floor;
      ++clamped;
    }
  }
  return clamped;
}

Index smd_displacement(const ParticleCloud& cloud, const SmdSpec& spec, double dt,
                       const Eigen::Ref<const Vector>& zeta, Eigen::Ref<RowMatrix> out) {
  return smd_displacement(cloud, compute_moments(cloud), spec, dt, zeta, out);
}

Index smd_displacement(const ParticleCloud& cloud, EmpiricalMoments moments, const SmdSpec& spec,
                       double dt, const Eigen::Ref<const Vector>& zeta, Eigen::Ref<RowMatrix> out) {
  const Index n = cloud.size();
  const Index d = cloud.dim();
  if (zeta.size() != noise_dimension(spec.observable, d))
    throw InvalidInput("smd_displacement: common increment has the wrong dimension");
  if (out.rows() != n || out.cols() != d)
    throw InvalidInput("smd_displacement: output must be N x d");

  if (spec.beta == 0.0) {
    out.setZero();
    return 0;
  }
  const Index clamped = regularize_moments(moments, spec);
  const double sdt = std::sqrt(dt);
  const double bessel = spec.delta - 1.5;
  const auto& x = cloud.positions();

  // Every closed form is diagonal, so the update is a per-coordinate affine
  // map of either x (second moment) or x - m (variance).
  switch (spec.observable) {
    case Observable::Mean:
      out.rowwise() = (sdt * spec.beta) * zeta.transpose();
      break;
    case Observable::SecondMoment: {
      const Eigen::ArrayXd m2 = moments.second_moment.array();
      const Eigen::ArrayXd gain =
          spec.beta * (dt * bessel / (4.0 * m2.square()) + sdt * zeta.array() / (2.0 * m2));
      out = x.array().rowwise() * gain.transpose();
      break;
    }
    case Observable::Variance:
    case Observable::MeanPlusVariance: {
      const Eigen::ArrayXd var = moments.variance.array();
      const Eigen::ArrayXd zvar = zeta.tail(d).array();
      const Eigen::ArrayXd gain =
          spec.beta * (dt * bessel / (4.0 * var.square()) + sdt * zvar / (2.0 * var));
      out = (x.rowwise() - moments.mean.transpose()).array().rowwise() * gain.transpose();
      if (spec.observable == Observable::MeanPlusVariance)
        out.rowwise() += (sdt * spec.beta) * zeta.head(d).transpose();
      break;
    }
  }
  return clamped;
}

}  // namespace mkvnoise
