#pragma once

// Aggregate statistics over collections of runs: average rank, empirical
// competitive ratio, Mann-Whitney U tests and the asymmetric
// vanilla-versus-variants significance protocol.

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mkvnoise {

/// Final best values of one method, one sample vector per benchmark.
struct MethodResults {
  std::string method;
  std::vector<std::vector<double>> samples;

  double mean(std::size_t benchmark) const;
};

/// df_m = mean(final_best) - known_min_value, per benchmark.
std::vector<double> distances_to_optimum(const MethodResults& method,
                                         std::span<const double> known_min);

/// ECR(m) = mean over benchmarks of min(100, df_m / df*), df* the smallest
/// df over methods. When df* = 0 the ratio is 1 for methods at distance 0 and
/// 100 for the rest. distances[m][b].
std::vector<double> ecr(const std::vector<std::vector<double>>& distances);
std::vector<double> ecr(std::span<const MethodResults> methods, std::span<const double> known_min);

/// Mean over benchmarks of the rank of each method's mean value (ascending,
/// ties share the average rank).
std::vector<double> average_rank(std::span<const MethodResults> methods);

/// Ranks with averaged ties, 1-based.
std::vector<double> tied_ranks(std::span<const double> values);

enum class Alternative {
  TwoSided,
  Less,     // a tends to be smaller than b
  Greater,  // a tends to be larger than b
};

struct MannWhitneyResult {
  double u;        // U statistic of sample a: #(a_i > b_j) + 0.5 #(a_i == b_j)
  double p_value;  // in (0, 1]
  bool exact;
};

/// Exact null distribution when |a| + |b| <= 12 and there are no ties,
/// otherwise the normal approximation with tie and continuity corrections.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 Alternative alternative = Alternative::TwoSided);

/// Normal-approximation p-value only; exposed for comparison against the
/// exact distribution.
double mann_whitney_normal_p(std::span<const double> a, std::span<const double> b,
                             Alternative alternative = Alternative::TwoSided);

inline constexpr std::size_t kExactThreshold = 12;

struct SignificanceCell {
  std::size_t best_method = 0;
  std::vector<std::size_t> compared;  // methods tested against the best one
  std::optional<double> max_p;        // empty when no test was run
  bool significant = false;
};

/// For each benchmark: if the vanilla method has the best mean it is tested
/// against every variant, otherwise the best variant is tested against the
/// vanilla method only. Reports the largest p-value and whether it is below
/// level. One-sided alternatives test "best is smaller".
std::vector<SignificanceCell> significance_protocol(std::span<const MethodResults> methods,
                                                    std::size_t vanilla, double level = 0.05,
                                                    bool one_sided = false);

}  // namespace mkvnoise
