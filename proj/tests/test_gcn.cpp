#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "mkvnoise/errors.hpp"
#include "mkvnoise/gcn.hpp"
#include "support.hpp"

using namespace mkvnoise;
using test_support::to_cloud;

namespace {

std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> r(static_cast<std::size_t>(m.rows()),
                                     std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  return r;
}

// Random cloud in which some particles are exact copies of others.
oracle::Points cloud_with_duplicates(std::mt19937_64& gen, std::size_t n, std::size_t d) {
  auto pts = oracle::random_points(n, d, -1.5, 1.5, gen());
  for (std::size_t i = 1; i < n; ++i)
    if (gen() % 4 == 0) pts[i] = pts[gen() % i];
  return pts;
}

}  // namespace

TEST(Gram, MatchesOracleAndIsWellFormed) {
  const auto pts = oracle::random_points(12, 3, -1, 1, 1);
  const Matrix K = gram_matrix(to_cloud(pts), 0.7);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) {
      EXPECT_NEAR(K(static_cast<Index>(i), static_cast<Index>(j)), oracle::gaussian_kernel(pts[i], pts[j], 0.7), 1e-15);
      EXPECT_GT(K(static_cast<Index>(i), static_cast<Index>(j)), 0.0);
      EXPECT_LE(K(static_cast<Index>(i), static_cast<Index>(j)), 1.0);
    }
  EXPECT_TRUE(K.diagonal().isOnes(0.0));
  EXPECT_TRUE(K == K.transpose());
}

TEST(PsdSqrt, ClosedFormCases) {
  EXPECT_TRUE(psd_sqrt(Matrix::Identity(4, 4)).isApprox(Matrix::Identity(4, 4), 1e-14));
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 4, 9;
  Matrix expect = Matrix::Zero(2, 2);
  expect.diagonal() << 2, 3;
  EXPECT_TRUE(psd_sqrt(d).isApprox(expect, 1e-14));
  const Matrix J = Matrix::Ones(2, 2);
  EXPECT_LE((psd_sqrt(J) - J / std::sqrt(2.0)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PsdSqrt, RejectsAsymmetricInput) {
  Matrix K = Matrix::Identity(3, 3);
  K(0, 1) = 0.5;
  EXPECT_THROW(psd_sqrt(K), InvalidInput);
}

TEST(PsdSqrt, RandomPsdReconstruction) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n01;
  Matrix A(20, 20);
  for (Index i = 0; i < 20; ++i)
    for (Index j = 0; j < 20; ++j) A(i, j) = n01(gen);
  const Matrix K = A * A.transpose();
  const Matrix S = psd_sqrt(K);
  EXPECT_TRUE(S == S.transpose());
  EXPECT_LT(oracle::frobenius_rel(oracle::matmul(to_rows(S), to_rows(S)), to_rows(K)), 1e-8);
}

TEST(PsdSqrt, GramReconstructionWithCoincidentParticles) {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + gen() % 50, d = 1 + gen() % 4;
    const auto pts = cloud_with_duplicates(gen, n, d);
    const auto g = make_kernel_gram(to_cloud(pts), GcnSpec{});
    const auto ref = to_rows(g.K);
    EXPECT_LT(oracle::frobenius_rel(oracle::matmul(to_rows(g.sqrt_K), to_rows(g.sqrt_K)), ref), 1e-8)
        << "n=" << n;
  }
}

TEST(SampleGcn, SingleParticleIsScaledGaussian) {
  const auto c = to_cloud({{0.3, -0.2, 1.0}});
  GcnSpec spec;
  spec.beta = 1.7;
  RngStream a(3, 1), b(3, 1);
  const RowMatrix y = sample_gcn(c, spec, 0.25, a);
  RowMatrix xi(1, 3);
  b.fill_normal(xi);
  EXPECT_LE((y - 0.5 * 1.7 * xi).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SampleGcn, CoincidentParticlesMoveTogether) {
  const auto c = to_cloud({{0.5, 0.5}, {0.5, 0.5}});
  RngStream rng(8, 0);
  for (int t = 0; t < 20; ++t) {
    const RowMatrix y = sample_gcn(c, GcnSpec{}, 0.1, rng);
    EXPECT_NEAR(y(0, 0), y(1, 0), 1e-14);
    EXPECT_NEAR(y(0, 1), y(1, 1), 1e-14);
  }
}

TEST(SampleGcn, ZeroIntensity) {
  const auto c = to_cloud(oracle::random_points(5, 2, -1, 1, 9));
  GcnSpec spec;
  spec.beta = 0.0;
  RngStream rng(1, 1);
  EXPECT_TRUE(sample_gcn(c, spec, 0.1, rng).isZero(0.0));
}

TEST(GcnFactor, AgreesWithDirectProduct) {
  const auto pts = oracle::random_points(9, 3, -1, 1, 10);
  const auto c = to_cloud(pts);
  const GcnSpec spec;
  RowMatrix draws(9, 3);
  RngStream rng(2, 2);
  rng.fill_normal(draws);
  const GcnFactor f(c, spec);
  const Matrix S = make_kernel_gram(c, spec).sqrt_K;
  EXPECT_LE((f.apply(draws, 1.0) - S * draws).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LE((f.sqrt_K() - S).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_TRUE(gcn_displacement(c, spec, 0.04, draws) == f.apply(draws, 0.2));
}

TEST(GcnFactor, ExchangeableBitForBit) {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + gen() % 25;
    const auto pts = cloud_with_duplicates(gen, n, 3);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    oracle::Points permuted(n);
    for (std::size_t k = 0; k < n; ++k) permuted[k] = pts[perm[k]];

    RowMatrix draws(static_cast<Index>(n), 3), pdraws(static_cast<Index>(n), 3);
    RngStream rng(t, 0);
    rng.fill_normal(draws);
    for (std::size_t k = 0; k < n; ++k) pdraws.row(static_cast<Index>(k)) = draws.row(static_cast<Index>(perm[k]));

    const RowMatrix y = gcn_displacement(to_cloud(pts), GcnSpec{}, 0.1, draws);
    const RowMatrix py = gcn_displacement(to_cloud(permuted), GcnSpec{}, 0.1, pdraws);
    for (std::size_t k = 0; k < n; ++k)
      ASSERT_TRUE(py.row(static_cast<Index>(k)) == y.row(static_cast<Index>(perm[k])));
  }
}

TEST(GcnCovariance, FactorSquaresToKroneckerStructure) {
  // Cov(vec Y) = dt beta^2 (sqrt K (x) I)(sqrt K (x) I)^T = dt beta^2 K (x) I.
  const auto pts = oracle::random_points(5, 2, -1, 1, 12);
  const auto c = to_cloud(pts);
  const Matrix S = GcnFactor(c, GcnSpec{}).sqrt_K();
  const std::size_t n = 5, d = 2;
  std::vector<std::vector<double>> L(n * d, std::vector<double>(n * d, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < d; ++j) L[i * d + j][k * d + j] = S(static_cast<Index>(i), static_cast<Index>(k));
  auto Lt = L;
  for (std::size_t a = 0; a < n * d; ++a)
    for (std::size_t b = 0; b < n * d; ++b) Lt[a][b] = L[b][a];
  EXPECT_LT(oracle::frobenius_rel(oracle::matmul(L, Lt), oracle::kron_identity_cov(pts, 1.0)), 1e-10);
}

TEST(GcnLimits, LargeAndSmallBandwidth) {
  RngStream rng(13, 0);
  const auto c = to_cloud(oracle::random_points(5, 2, 0, 1, 13));
  const auto large = gcn_limit_check(GcnLimit::LargeSigma, c, 0.1, 200, rng);
  EXPECT_TRUE(large.passed) << large.statistic;
  EXPECT_LT(large.statistic, 1e-3);
  const auto small = gcn_limit_check(GcnLimit::SmallSigma, c, 0.1, 10000, rng);
  EXPECT_TRUE(small.passed) << small.statistic;
  EXPECT_LT(small.statistic, 0.05);
}

TEST(GcnLimits, SingleParticleTriviallyPasses) {
  RngStream rng(14, 0);
  const auto c = to_cloud({{0.0, 0.0}});
  EXPECT_TRUE(gcn_limit_check(GcnLimit::LargeSigma, c, 0.1, 10, rng).passed);
  EXPECT_TRUE(gcn_limit_check(GcnLimit::SmallSigma, c, 0.1, 10, rng).passed);
}

TEST(GcnSpec, Validation) {
  GcnSpec s;
  s.bandwidth = 0.0;
  EXPECT_THROW(validate(s), ConfigError);
  s = GcnSpec{};
  s.beta = -1.0;
  EXPECT_THROW(validate(s), ConfigError);
  s = GcnSpec{};
  s.sqrt_refresh_every = 0;
  EXPECT_THROW(validate(s), ConfigError);
}
