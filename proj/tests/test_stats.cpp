#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mkvnoise/errors.hpp"
#include "mkvnoise/stats.hpp"
#include "oracles.hpp"

using namespace mkvnoise;

namespace {

MethodResults method(std::string name, std::vector<std::vector<double>> samples) {
  return {std::move(name), std::move(samples)};
}

std::vector<double> tie_free(std::mt19937_64& gen, std::size_t n) {
  std::vector<double> v(n);
  std::normal_distribution<double> n01;
  for (auto& x : v) x = n01(gen);
  return v;
}

}  // namespace

TEST(Ecr, SingleMethodIsOne) {
  const std::vector<MethodResults> ms{method("a", {{1.0, 2.0}, {5.0}})};
  const std::vector<double> known{0.0, 1.0};
  EXPECT_EQ(ecr(ms, known), std::vector<double>{1.0});
}

TEST(Ecr, HandComputedAndCapped) {
  EXPECT_EQ(ecr({{1.0, 2.0}, {2.0, 1.0}}), (std::vector<double>{1.5, 1.5}));
  const auto capped = ecr({{1.0}, {1000.0}});
  EXPECT_EQ(capped[1], 100.0);
}

TEST(Ecr, ZeroBestDistance) {
  const auto r = ecr({{0.0, 1.0}, {0.0, 2.0}, {3.0, 1.0}});
  EXPECT_DOUBLE_EQ(r[0], 1.0);
  EXPECT_DOUBLE_EQ(r[1], (1.0 + 2.0) / 2);
  EXPECT_DOUBLE_EQ(r[2], (100.0 + 1.0) / 2);
}

TEST(Ecr, BestEverywhereGivesExactlyOne) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::vector<double>> df(4, std::vector<double>(6));
    for (std::size_t b = 0; b < 6; ++b) {
      df[0][b] = 0.1 + static_cast<double>(gen() % 100) / 10;
      for (std::size_t m = 1; m < 4; ++m) df[m][b] = df[0][b] + 0.5 + static_cast<double>(gen() % 50);
    }
    EXPECT_EQ(ecr(df)[0], 1.0);
  }
}

TEST(Ecr, EmptyBenchmarkSetThrows) {
  const std::vector<MethodResults> ms{method("a", {})};
  EXPECT_THROW(ecr(ms, std::vector<double>{}), InvalidInput);
}

TEST(Rank, TiesAndStrictOrders) {
  EXPECT_EQ(tied_ranks(std::vector<double>{1, 1, 2}), (std::vector<double>{1.5, 1.5, 3}));
  const std::vector<MethodResults> same{method("a", {{1}, {2}}), method("b", {{1}, {2}}),
                                        method("c", {{1}, {2}})};
  EXPECT_EQ(average_rank(same), (std::vector<double>{2, 2, 2}));
  const std::vector<MethodResults> strict{method("a", {{3}, {3}}), method("b", {{1}, {1}}),
                                          method("c", {{2}, {2}})};
  EXPECT_EQ(average_rank(strict), (std::vector<double>{3, 1, 2}));
}

TEST(Rank, MatchesOracleAndIsInvariantUnderMonotoneMaps) {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(2 + gen() % 10);
    for (auto& x : v) x = static_cast<double>(gen() % 5);
    EXPECT_EQ(tied_ranks(v), oracle::ranks(v));

    std::vector<MethodResults> means, mapped_means;
    for (int m = 0; m < 4; ++m) {
      std::vector<std::vector<double>> a(3), b(3);
      for (std::size_t k = 0; k < 3; ++k) {
        const double x = static_cast<double>(gen() % 7) - 3.0;
        a[k] = {x};
        b[k] = {std::exp(x) + 5};
      }
      means.push_back(method("m", a));
      mapped_means.push_back(method("m", b));
    }
    EXPECT_EQ(average_rank(means), average_rank(mapped_means));
  }
}

TEST(MannWhitney, ClosedCases) {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  const auto r = mann_whitney_u(a, b);
  EXPECT_EQ(r.u, 0.0);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.p_value, 0.1, 1e-15);
  EXPECT_NEAR(mann_whitney_u(a, b, Alternative::Less).p_value, 0.05, 1e-15);
  EXPECT_NEAR(mann_whitney_u(a, b, Alternative::Greater).p_value, 1.0, 1e-15);

  EXPECT_EQ(mann_whitney_u(a, a).p_value, 1.0);
  const std::vector<double> big(30, 2.5);
  EXPECT_EQ(mann_whitney_u(big, big).p_value, 1.0);
}

TEST(MannWhitney, ExactMatchesEnumerationOracle) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + gen() % 6, m = 1 + gen() % 6;
    const auto a = tie_free(gen, n), b = tie_free(gen, m);
    const auto r = mann_whitney_u(a, b);
    ASSERT_TRUE(r.exact);
    EXPECT_NEAR(r.p_value, oracle::mann_whitney_exact_two_sided(a, b), 1e-12);
  }
}

TEST(MannWhitney, SymmetricUnderSwap) {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + gen() % 15, m = 1 + gen() % 15;
    std::vector<double> a(n), b(m);
    for (auto& x : a) x = static_cast<double>(gen() % 8);
    for (auto& x : b) x = static_cast<double>(gen() % 8);
    const auto ab = mann_whitney_u(a, b), ba = mann_whitney_u(b, a);
    EXPECT_NEAR(ab.u + ba.u, static_cast<double>(n * m), 1e-12);
    EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
    EXPECT_GT(ab.p_value, 0.0);
    EXPECT_LE(ab.p_value, 1.0);
  }
}

TEST(MannWhitney, LargeShiftedSamples) {
  std::mt19937_64 gen(5);
  auto a = tie_free(gen, 50), b = tie_free(gen, 50);
  for (auto& x : b) x += 5.0;
  const auto r = mann_whitney_u(a, b);
  EXPECT_FALSE(r.exact);
  EXPECT_LT(r.p_value, 1e-6);
}

TEST(MannWhitney, NormalApproximationTracksExactForModerateSizes) {
  std::mt19937_64 gen(6);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 3 + gen() % 4, m = 3 + gen() % 4;
    const auto a = tie_free(gen, n), b = tie_free(gen, m);
    EXPECT_NEAR(mann_whitney_u(a, b).p_value, mann_whitney_normal_p(a, b), 0.05)
        << "n=" << n << " m=" << m;
  }
}

TEST(MannWhitney, EmptySampleThrows) {
  EXPECT_THROW(mann_whitney_u(std::vector<double>{}, std::vector<double>{1.0}), InvalidInput);
}

TEST(Protocol, VariantBestTestedAgainstVanillaOnly) {
  // vanilla clearly worse; variant 2 best
  std::vector<MethodResults> ms{method("v", {{10, 11, 12, 13, 14, 15, 16}}),
                                method("a", {{5, 6, 7, 8, 9, 10.5, 11.5}}),
                                method("b", {{1, 2, 3, 4, 5.5, 6.5, 7.5}})};
  const auto cells = significance_protocol(ms, 0);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].best_method, 2u);
  EXPECT_EQ(cells[0].compared, std::vector<std::size_t>{0});
  ASSERT_TRUE(cells[0].max_p);
  EXPECT_NEAR(*cells[0].max_p, mann_whitney_u(ms[2].samples[0], ms[0].samples[0]).p_value, 0);
  EXPECT_TRUE(cells[0].significant);
}

TEST(Protocol, VanillaBestReportsLargestP) {
  std::vector<MethodResults> ms{method("v", {{1, 2, 3, 4, 5}}),
                                method("a", {{10, 11, 12, 13, 14}}),
                                method("b", {{2.5, 3.5, 4.5, 5.5, 6.5}})};
  const auto cells = significance_protocol(ms, 0);
  EXPECT_EQ(cells[0].best_method, 0u);
  EXPECT_EQ(cells[0].compared, (std::vector<std::size_t>{1, 2}));
  const double pa = mann_whitney_u(ms[0].samples[0], ms[1].samples[0]).p_value;
  const double pb = mann_whitney_u(ms[0].samples[0], ms[2].samples[0]).p_value;
  EXPECT_EQ(*cells[0].max_p, std::max(pa, pb));
  EXPECT_FALSE(cells[0].significant);
}

TEST(Protocol, SingleMethodRunsNoTests) {
  std::vector<MethodResults> ms{method("v", {{1, 2, 3}})};
  const auto cells = significance_protocol(ms, 0);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_FALSE(cells[0].max_p);
  EXPECT_TRUE(cells[0].compared.empty());
  EXPECT_FALSE(cells[0].significant);
}

TEST(Protocol, IdenticalMethodsGiveUnitP) {
  std::vector<MethodResults> ms{method("v", {{1, 2, 3, 4}}), method("a", {{1, 2, 3, 4}})};
  const auto cells = significance_protocol(ms, 0);
  EXPECT_EQ(cells[0].best_method, 0u);
  EXPECT_EQ(*cells[0].max_p, 1.0);
}

TEST(Distances, MeanMinusKnownMinimum) {
  const auto m = method("a", {{1, 3}, {-1, -1}});
  const std::vector<double> known{0.0, -1.0};
  EXPECT_EQ(distances_to_optimum(m, known), (std::vector<double>{2.0, 0.0}));
}
