#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mkvnoise/dynamics.hpp"
#include "mkvnoise/errors.hpp"
#include "mkvnoise/objectives.hpp"
#include "support.hpp"

using namespace mkvnoise;
using test_support::cloud_1d;
using test_support::to_cloud;

namespace {

Objective half_square(Index d) {
  return Objective("half-square", d, [](const auto& x) { return 0.5 * x.squaredNorm(); },
                   [](const auto& x, auto g) { g = x; }, Box::uniform(d, -10, 10), 0.0,
                   Vector::Zero(d));
}

}  // namespace

TEST(Kernel, ValueAndGradient) {
  const Vector x = Vector::Constant(1, 0.0), y = Vector::Constant(1, 1.0);
  const auto k = gaussian_kernel(x, y, 1.0);
  EXPECT_NEAR(k.value, std::exp(-1.0), 1e-15);
  EXPECT_NEAR(k.grad_x(0), -2.0 * (0.0 - 1.0) * std::exp(-1.0), 1e-15);

  const auto self = gaussian_kernel(y, y, 0.3);
  EXPECT_EQ(self.value, 1.0);
  EXPECT_TRUE(self.grad_x.isZero(0.0));
}

TEST(Kernel, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 50; ++t) {
    const Index d = 1 + static_cast<Index>(gen() % 5);
    Vector x(d), y(d);
    for (Index j = 0; j < d; ++j) x(j) = n01(gen), y(j) = n01(gen);
    const double sigma = 0.5 + std::abs(n01(gen));
    const auto k = gaussian_kernel(x, y, sigma);
    Vector fd(d);
    const double h = 1e-6;
    for (Index j = 0; j < d; ++j) {
      Vector xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      fd(j) = (gaussian_kernel(xp, y, sigma).value - gaussian_kernel(xm, y, sigma).value) / (2 * h);
    }
    EXPECT_LT((k.grad_x - fd).norm() / std::max(1e-3, k.grad_x.norm()), 1e-7);
  }
}

TEST(Consensus, SingleParticleIsItself) {
  const auto c = to_cloud({{1.0, -2.0}});
  const std::vector<double> f{3.0};
  EXPECT_TRUE(cbo_consensus(c, f, 1.0).isApprox(Vector(c.particle(0).transpose())));
}

TEST(Consensus, SmallAlphaGivesArithmeticMean) {
  const auto pts = oracle::random_points(30, 3, -5, 5, 1);
  const auto c = to_cloud(pts);
  std::vector<double> f(30);
  for (std::size_t i = 0; i < 30; ++i) f[i] = static_cast<double>(i);
  const Vector v = cbo_consensus(c, f, 1e-12);
  const auto ref = oracle::moments(pts);
  for (Index j = 0; j < 3; ++j) EXPECT_NEAR(v(j), ref.mean[static_cast<std::size_t>(j)], 1e-9);
}

TEST(Consensus, LargeAlphaPicksTheMinimiser) {
  const auto c = cloud_1d({0.0, 1.0});
  const std::vector<double> f{5.0, 1.0};
  EXPECT_NEAR(cbo_consensus(c, f, 1e3)(0), 1.0, 1e-6);
}

TEST(Consensus, ShiftInvariantAndOverflowSafe) {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 100; ++t) {
    const auto c = to_cloud(oracle::random_points(20, 4, -3, 3, gen()));
    std::vector<double> f(20), g(20);
    const double shift = std::uniform_real_distribution<double>(-1e3, 1e3)(gen);
    for (std::size_t i = 0; i < 20; ++i) {
      f[i] = std::uniform_real_distribution<double>(0, 10)(gen);
      g[i] = f[i] + shift;
    }
    EXPECT_LE((cbo_consensus(c, f, 1.0) - cbo_consensus(c, g, 1.0)).cwiseAbs().maxCoeff(), 1e-12);
  }
  const auto c = cloud_1d({0.0, 2.0});
  const std::vector<double> big{5000.0, 5000.0};
  EXPECT_NEAR(cbo_consensus(c, big, 1.0)(0), 1.0, 1e-15);
}

TEST(Consensus, ConvergesToArgminAsAlphaGrows) {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 50; ++t) {
    const auto pts = oracle::random_points(15, 3, -2, 2, gen());
    const auto c = to_cloud(pts);
    const auto obj = half_square(3);
    const Vector fv = obj.values(c);
    const std::vector<double> f(fv.data(), fv.data() + fv.size());
    Index best;
    fv.minCoeff(&best);
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {10.0, 100.0, 1000.0}) {
      const double dist = (cbo_consensus(c, f, alpha) - c.particle(best).transpose()).norm();
      EXPECT_LE(dist, prev + 1e-15);
      prev = dist;
    }
  }
}

TEST(Heaviside, LogisticShape) {
  EXPECT_DOUBLE_EQ(smooth_heaviside(0.0, 0.01), 0.5);
  EXPECT_NEAR(smooth_heaviside(1.0, 0.01), 1.0, 1e-40);
  EXPECT_NEAR(smooth_heaviside(-1.0, 0.01), 0.0, 1e-40);
  EXPECT_NEAR(smooth_heaviside(0.3, 0.1) + smooth_heaviside(-0.3, 0.1), 1.0, 1e-15);
  EXPECT_TRUE(std::isfinite(smooth_heaviside(-1e6, 1e-2)));
  EXPECT_TRUE(std::isfinite(smooth_heaviside(1e6, 1e-2)));
}

TEST(Cbo, ClosedFormCase) {
  CboConfig cfg;
  cfg.lambda = 1.0;
  cfg.gamma = 2.0;
  const auto co = cbo_coefficients(Vector::Constant(1, 2.0), 3.0, Vector::Zero(1), 3.0, cfg);
  EXPECT_DOUBLE_EQ(co.drift(0), -1.0);
  EXPECT_DOUBLE_EQ(co.diffusion_scale, 4.0);
}

TEST(Cbo, FixedAtConsensusAndSaturatedAway) {
  const CboConfig cfg;
  const Vector v = Vector::Constant(2, 0.5);
  const auto at = cbo_coefficients(v, 1.0, v, 1.0, cfg);
  EXPECT_TRUE(at.drift.isZero(0.0));
  EXPECT_EQ(at.diffusion_scale, 0.0);

  const Vector x(Vector::Constant(2, 1.5));
  const auto far = cbo_coefficients(x, 100.0, v, 0.0, cfg);
  EXPECT_TRUE(far.drift.isApprox(-cfg.lambda * (x - v), 1e-12));
  EXPECT_NEAR(far.diffusion_scale, cfg.gamma * (x - v).norm(), 1e-12);
}

TEST(Sbs, SingleParticleIsGradientDescent) {
  const auto c = to_cloud({{1.0, -2.0}});
  const auto obj = half_square(2);
  const RowMatrix g = obj.gradients(c);
  const Vector drift = sbs_drift(c.particle(0).transpose(), c, g, 1.0, 0.7);
  EXPECT_TRUE(drift.isApprox(-Vector(g.row(0).transpose()), 1e-15));
}

TEST(Sbs, VanishingIntegrand) {
  const auto c = to_cloud(oracle::random_points(6, 3, -1, 1, 4));
  const RowMatrix g = RowMatrix::Zero(6, 3);
  EXPECT_TRUE(sbs_drift(c.particle(2).transpose(), c, g, 0.0, 1.0).isZero(0.0));
}

TEST(Sbs, TwoParticleHandSum) {
  // x = x1 = 0, x2 = 1, sigma = 1, V = x^2/2, kappa = 1. The kernel is
  // differentiated in the particle being averaged over (repulsion):
  // i=1: -k(0,0) V'(0) + d/dy k(0,y)|_{y=0} = 0.
  // i=2: -k(0,1) V'(1) + d/dy k(0,y)|_{y=1} = -e^-1 - 2(1-0)e^-1.
  const auto c = cloud_1d({0.0, 1.0});
  const RowMatrix g = half_square(1).gradients(c);
  const double e1 = std::exp(-1.0);
  const double attraction = -e1 * 1.0;
  const double repulsion = -2.0 * (1.0 - 0.0) * e1;
  EXPECT_NEAR(sbs_drift(Vector::Zero(1), c, g, 1.0, 1.0)(0), 0.5 * (attraction + repulsion), 1e-15);
}

TEST(Sbs, RepulsionPushesAwayFromNeighbours) {
  const auto c = cloud_1d({0.0, 0.5});
  const RowMatrix g = RowMatrix::Zero(2, 1);
  EXPECT_LT(sbs_drift(Vector::Zero(1), c, g, 1.0, 1.0)(0), 0.0);
  EXPECT_GT(sbs_drift(Vector::Constant(1, 0.5), c, g, 1.0, 1.0)(0), 0.0);
}

TEST(Sbs, SymmetricCloudGivesZeroDriftAtOrigin) {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 20; ++t) {
    auto half = oracle::random_points(7, 3, -2, 2, gen());
    oracle::Points pts = half;
    for (auto p : half) {
      for (auto& v : p) v = -v;
      pts.push_back(p);
    }
    const auto c = to_cloud(pts);
    const RowMatrix g = half_square(3).gradients(c);
    EXPECT_LE(sbs_drift(Vector::Zero(3), c, g, 1.0, 0.8).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Sbs, DefaultBandwidthIsInverseSquaredN) {
  EXPECT_DOUBLE_EQ(resolved_sbs_bandwidth(SbsConfig{}, 150), 1.0 / (150.0 * 150.0));
  SbsConfig cfg;
  cfg.bandwidth = 0.25;
  EXPECT_DOUBLE_EQ(resolved_sbs_bandwidth(cfg, 150), 0.25);
}

TEST(Baseline, FamilyDispatch) {
  const auto obj = half_square(2);
  const auto c = to_cloud({{3.0, 4.0}, {1.0, 0.0}});

  const DynamicsSpec msgd = MsgdConfig{};
  const auto sm = make_snapshot(msgd, c, obj);
  const auto cm = baseline_coefficients(msgd, 0, sm);
  EXPECT_TRUE(cm.drift.isApprox(Vector((Vector(2) << -3, -4).finished())));
  EXPECT_EQ(cm.diffusion_scale, 0.0);

  const DynamicsSpec lang = LangevinConfig{1.0};
  const auto cl = baseline_coefficients(lang, 0, make_snapshot(lang, c, obj));
  EXPECT_DOUBLE_EQ(cl.diffusion_scale, std::sqrt(2.0));
  EXPECT_TRUE(has_particle_diffusion(lang));
  EXPECT_FALSE(has_particle_diffusion(msgd));
  EXPECT_FALSE(has_particle_diffusion(SbsConfig{}));
  EXPECT_TRUE(has_particle_diffusion(CboConfig{}));

  const auto single = to_cloud({{3.0, 4.0}});
  const DynamicsSpec sbs = SbsConfig{};
  const auto cs = baseline_coefficients(sbs, 0, make_snapshot(sbs, single, obj));
  EXPECT_TRUE(cs.drift.isApprox(Vector((Vector(2) << -3, -4).finished())));
}

TEST(Baseline, Validation) {
  EXPECT_THROW(validate(LangevinConfig{0.0}), ConfigError);
  EXPECT_THROW(validate(CboConfig{0.0, 1.0, 1.0, 0.01}), ConfigError);
  EXPECT_THROW(validate(CboConfig{1.0, -1.0, 1.0, 0.01}), ConfigError);
  EXPECT_THROW(validate(CboConfig{1.0, 1.0, 0.0, 0.01}), ConfigError);
  EXPECT_THROW(validate(CboConfig{1.0, 1.0, 1.0, 0.0}), ConfigError);
  SbsConfig bad;
  bad.bandwidth = 0.0;
  EXPECT_THROW(validate(bad), ConfigError);
  EXPECT_NO_THROW(validate(CboConfig{}));
  EXPECT_THROW(validate(DynamicsSpec(CustomDynamics{})), ConfigError);
}

TEST(Baseline, AllDriftsFiniteOnRandomClouds) {
  std::mt19937_64 gen(12);
  const auto obj = make_objective("rastrigin", 4);
  const std::vector<DynamicsSpec> specs{MsgdConfig{}, LangevinConfig{}, CboConfig{}, SbsConfig{}};
  for (int t = 0; t < 50; ++t) {
    const auto c = to_cloud(oracle::random_points(25, 4, -5.12, 5.12, gen()));
    for (const auto& spec : specs) {
      const auto snap = make_snapshot(spec, c, obj);
      for (Index i = 0; i < c.size(); ++i) {
        const auto co = baseline_coefficients(spec, i, snap);
        ASSERT_TRUE(co.drift.allFinite()) << family_name(spec);
        ASSERT_TRUE(std::isfinite(co.diffusion_scale));
      }
    }
  }
}
