#include "mkvnoise/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mkvnoise/errors.hpp"

namespace mkvnoise {

namespace {

double clamp_p(double p) {
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

bool has_ties(std::span<const double> a, std::span<const double> b) {
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  return std::adjacent_find(all.begin(), all.end()) != all.end();
}

// counts[u] = number of orderings of n a-values and m b-values with U = u,
// built from c(n, m, u) = c(n-1, m, u-m) + c(n, m-1, u).
std::vector<double> exact_u_counts(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::vector<double>>> c(
      n + 1, std::vector<std::vector<double>>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      c[i][j].assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        c[i][j][0] = 1.0;
        continue;
      }
      for (std::size_t u = 0; u <= i * j; ++u) {
        double v = u < c[i][j - 1].size() ? c[i][j - 1][u] : 0.0;
        if (u >= j && u - j < c[i - 1][j].size()) v += c[i - 1][j][u - j];
        c[i][j][u] = v;
      }
    }
  }
  return c[n][m];
}

double u_statistic(std::span<const double> a, std::span<const double> b) {
  double u = 0.0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  return u;
}

}  // namespace

double MethodResults::mean(std::size_t benchmark) const {
  const auto& s = samples.at(benchmark);
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

std::vector<double> distances_to_optimum(const MethodResults& method,
                                         std::span<const double> known_min) {
  if (known_min.size() != method.samples.size())
    throw InvalidInput("one known minimum per benchmark required");
  std::vector<double> df(known_min.size());
  for (std::size_t b = 0; b < known_min.size(); ++b) df[b] = method.mean(b) - known_min[b];
  return df;
}

std::vector<double> ecr(const std::vector<std::vector<double>>& distances) {
  if (distances.empty()) return {};
  const std::size_t n_bench = distances.front().size();
  if (n_bench == 0) throw InvalidInput("ECR needs at least one benchmark");
  for (const auto& row : distances)
    if (row.size() != n_bench) throw InvalidInput("ECR: ragged distance table");

  std::vector<double> out(distances.size(), 0.0);
  for (std::size_t b = 0; b < n_bench; ++b) {
    // Distances are clamped at 0: nothing can beat the known optimum.
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : distances) best = std::min(best, std::max(row[b], 0.0));
    for (std::size_t m = 0; m < distances.size(); ++m) {
      const double df = std::max(distances[m][b], 0.0);
      double ratio;
      if (best > 0.0) ratio = std::min(100.0, df / best);
      else ratio = df == 0.0 ? 1.0 : 100.0;
      out[m] += ratio;
    }
  }
  for (double& v : out) v /= static_cast<double>(n_bench);
  return out;
}

std::vector<double> ecr(std::span<const MethodResults> methods, std::span<const double> known_min) {
  if (known_min.empty()) throw InvalidInput("ECR needs at least one benchmark");
  std::vector<std::vector<double>> distances;
  for (const auto& m : methods) distances.push_back(distances_to_optimum(m, known_min));
  return ecr(distances);
}

std::vector<double> tied_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> average_rank(std::span<const MethodResults> methods) {
  if (methods.empty()) return {};
  const std::size_t n_bench = methods.front().samples.size();
  std::vector<double> out(methods.size(), 0.0);
  if (n_bench == 0) return out;
  std::vector<double> means(methods.size());
  for (std::size_t b = 0; b < n_bench; ++b) {
    for (std::size_t m = 0; m < methods.size(); ++m) means[m] = methods[m].mean(b);
    const auto r = tied_ranks(means);
    for (std::size_t m = 0; m < methods.size(); ++m) out[m] += r[m];
  }
  for (double& v : out) v /= static_cast<double>(n_bench);
  return out;
}

double mann_whitney_normal_p(std::span<const double> a, std::span<const double> b,
                             Alternative alternative) {
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  const double total = n + m;
  const double u = u_statistic(a, b);

  std::map<double, double> counts;
  for (double x : a) counts[x] += 1.0;
  for (double y : b) counts[y] += 1.0;
  double tie_term = 0.0;
  for (const auto& [value, t] : counts) tie_term += t * t * t - t;

  const double mu = 0.5 * n * m;
  double var = n * m / 12.0 * (total + 1.0);
  if (total > 1.0) var -= n * m / 12.0 * tie_term / (total * (total - 1.0));
  if (!(var > 0.0)) return 1.0;
  const double sd = std::sqrt(var);

  double p;
  switch (alternative) {
    case Alternative::TwoSided:
      p = std::erfc(std::max(0.0, std::abs(u - mu) - 0.5) / sd / std::sqrt(2.0));
      break;
    case Alternative::Less:
      p = 0.5 * std::erfc(-(u - mu + 0.5) / sd / std::sqrt(2.0));
      break;
    case Alternative::Greater:
    default:
      p = 0.5 * std::erfc((u - mu - 0.5) / sd / std::sqrt(2.0));
      break;
  }
  return clamp_p(p);
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 Alternative alternative) {
  if (a.empty() || b.empty()) throw InvalidInput("Mann-Whitney U needs two non-empty samples");
  const double u = u_statistic(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();

  if (n + m <= kExactThreshold && !has_ties(a, b)) {
    const auto counts = exact_u_counts(n, m);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    const auto k = static_cast<std::size_t>(u);  // integral without ties
    double lower = 0.0;
    double upper = 0.0;
    for (std::size_t v = 0; v < counts.size(); ++v) {
      if (v <= k) lower += counts[v];
      if (v >= k) upper += counts[v];
    }
    lower /= total;
    upper /= total;
    double p;
    switch (alternative) {
      case Alternative::TwoSided: p = 2.0 * std::min(lower, upper); break;
      case Alternative::Less: p = lower; break;
      case Alternative::Greater:
      default: p = upper; break;
    }
    return {u, clamp_p(p), true};
  }
  return {u, mann_whitney_normal_p(a, b, alternative), false};
}

std::vector<SignificanceCell> significance_protocol(std::span<const MethodResults> methods,
                                                    std::size_t vanilla, double level,
                                                    bool one_sided) {
  if (methods.empty()) return {};
  if (vanilla >= methods.size()) throw InvalidInput("vanilla method index out of range");
  const std::size_t n_bench = methods.front().samples.size();
  const Alternative alt = one_sided ? Alternative::Less : Alternative::TwoSided;

  std::vector<SignificanceCell> cells(n_bench);
  for (std::size_t b = 0; b < n_bench; ++b) {
    SignificanceCell& cell = cells[b];
    double best_mean = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const double v = methods[m].mean(b);
      if (v < best_mean || (v == best_mean && m == vanilla)) {
        best_mean = v;
        cell.best_method = m;
      }
    }
    if (methods.size() < 2) continue;

    if (cell.best_method == vanilla) {
      for (std::size_t m = 0; m < methods.size(); ++m)
        if (m != vanilla) cell.compared.push_back(m);
    } else {
      cell.compared.push_back(vanilla);
    }
    const auto& best = methods[cell.best_method].samples[b];
    for (std::size_t other : cell.compared) {
      const auto& rest = methods[other].samples[b];
      if (best.empty() || rest.empty()) continue;
      const double p = mann_whitney_u(best, rest, alt).p_value;
      cell.max_p = cell.max_p ? std::max(*cell.max_p, p) : p;
    }
    cell.significant = cell.max_p && *cell.max_p < level;
  }
  return cells;
}

}  // namespace mkvnoise
