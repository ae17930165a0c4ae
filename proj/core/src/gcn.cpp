#include "mkvnoise/gcn.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mkvnoise {

void validate(const GcnSpec& spec) {
  if (!(spec.bandwidth > 0.0)) throw ConfigError("GCN bandwidth must be > 0");
  if (!(spec.beta >= 0.0)) throw ConfigError("GCN beta must be >= 0");
  if (!(spec.eig_clamp_rel >= 0.0)) throw ConfigError("GCN eig_clamp_rel must be >= 0");
  if (spec.sqrt_refresh_every < 1) throw ConfigError("GCN sqrt_refresh_every must be >= 1");
}

Matrix gram_matrix(const ParticleCloud& cloud, double bandwidth) {
  const Index n = cloud.size();
  const auto& x = cloud.positions();
  Matrix K(n, n);
  for (Index i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (Index j = i + 1; j < n; ++j) {
      const double k = std::exp(-(x.row(i) - x.row(j)).squaredNorm() / bandwidth);
      K(i, j) = k;
      K(j, i) = k;
    }
  }
  return K;
}

Matrix psd_sqrt(const Matrix& K, double clamp_rel) {
  if (K.rows() != K.cols()) throw InvalidInput("psd_sqrt: matrix is not square");
  if (K.size() == 0) return K;
  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw InvalidInput("psd_sqrt: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(K);
  if (eig.info() != Eigen::Success) throw InvalidInput("psd_sqrt: eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();
  const double cutoff = clamp_rel * std::max(lambda.maxCoeff(), 0.0);
  Vector root(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i)
    root[i] = lambda[i] > cutoff ? std::sqrt(lambda[i]) : 0.0;
  const Matrix& Q = eig.eigenvectors();
  Matrix S = Q * root.asDiagonal() * Q.transpose();
  // Symmetrise away the rounding asymmetry of the product.
  return 0.5 * (S + S.transpose());
}

KernelGram make_kernel_gram(const ParticleCloud& cloud, const GcnSpec& spec) {
  KernelGram g;
  g.K = gram_matrix(cloud, spec.bandwidth);
  g.sqrt_K = psd_sqrt(g.K, spec.eig_clamp_rel);
  return g;
}

namespace {

template <typename A, typename B>
bool row_less(const A& a, const B& b) {
  for (Index j = 0; j < a.size(); ++j) {
    if (a(j) < b(j)) return true;
    if (b(j) < a(j)) return false;
  }
  return false;
}

}  // namespace

GcnFactor::GcnFactor(const ParticleCloud& cloud, const GcnSpec& spec) {
  const Index n = cloud.size();
  const auto& x = cloud.positions();
  order_.resize(static_cast<std::size_t>(n));
  std::iota(order_.begin(), order_.end(), Index{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](Index a, Index b) { return row_less(x.row(a), x.row(b)); });
  RowMatrix sorted(n, cloud.dim());
  for (Index k = 0; k < n; ++k) sorted.row(k) = x.row(order_[static_cast<std::size_t>(k)]);
  for (Index k = 0; k < n;) {
    Index e = k + 1;
    while (e < n && sorted.row(e) == sorted.row(k)) ++e;
    if (e - k > 1) ties_.emplace_back(k, e);
    k = e;
  }
  sqrt_sorted_ = psd_sqrt(gram_matrix(ParticleCloud(std::move(sorted)), spec.bandwidth),
                          spec.eig_clamp_rel);
  // Coincident particles have equal rows in the exact root; make them equal
  // bit for bit so relabelling within a tie group cannot change the output.
  for (const auto& [b, e] : ties_) {
    for (Index k = b + 1; k < e; ++k) sqrt_sorted_.row(k) = sqrt_sorted_.row(b);
    for (Index k = b + 1; k < e; ++k) sqrt_sorted_.col(k) = sqrt_sorted_.col(b);
  }
}

RowMatrix GcnFactor::apply(const RowMatrix& draws, double scale) const {
  const Index n = size();
  if (draws.rows() != n) throw InvalidInput("GcnFactor::apply: one draw row per particle required");
  RowMatrix sorted(n, draws.cols());
  for (Index k = 0; k < n; ++k) sorted.row(k) = draws.row(order_[static_cast<std::size_t>(k)]);
  // Within a tie group the draws are exchangeable; order them by value so
  // the product does not depend on which particle carried which draw.
  for (const auto& [b, e] : ties_) {
    std::vector<Index> idx(static_cast<std::size_t>(e - b));
    std::iota(idx.begin(), idx.end(), b);
    std::sort(idx.begin(), idx.end(),
              [&](Index u, Index v) { return row_less(sorted.row(u), sorted.row(v)); });
    RowMatrix block(e - b, sorted.cols());
    for (Index k = 0; k < e - b; ++k) block.row(k) = sorted.row(idx[static_cast<std::size_t>(k)]);
    sorted.middleRows(b, e - b) = block;
  }
  RowMatrix product = scale * (sqrt_sorted_ * sorted);
  for (const auto& [b, e] : ties_)
    for (Index k = b + 1; k < e; ++k) product.row(k) = product.row(b);
  RowMatrix out(n, draws.cols());
  for (Index k = 0; k < n; ++k) out.row(order_[static_cast<std::size_t>(k)]) = product.row(k);
  return out;
}

Matrix GcnFactor::sqrt_K() const {
  const Index n = size();
  Matrix S(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      S(order_[static_cast<std::size_t>(a)], order_[static_cast<std::size_t>(b)]) =
          sqrt_sorted_(a, b);
  return S;
}

RowMatrix gcn_displacement(const ParticleCloud& cloud, const GcnSpec& spec, double dt,
                           const RowMatrix& draws) {
  if (draws.rows() != cloud.size() || draws.cols() != cloud.dim())
    throw InvalidInput("gcn_displacement: draws must be N x d");
  if (spec.beta == 0.0) return RowMatrix::Zero(cloud.size(), cloud.dim());
  return GcnFactor(cloud, spec).apply(draws, std::sqrt(dt) * spec.beta);
}

RowMatrix sample_gcn(const ParticleCloud& cloud, const GcnSpec& spec, double dt, RngStream& rng) {
  RowMatrix draws(cloud.size(), cloud.dim());
  rng.fill_normal(draws);
  return gcn_displacement(cloud, spec, dt, draws);
}

std::string_view limit_name(GcnLimit mode) {
  return mode == GcnLimit::LargeSigma ? "large_sigma" : "small_sigma";
}

GcnLimitReport gcn_limit_check(GcnLimit mode, const ParticleCloud& cloud, double dt,
                               Index n_samples, RngStream& rng) {
  GcnSpec spec;
  spec.beta = 1.0;
  const Index n = cloud.size();
  const Index d = cloud.dim();
  GcnLimitReport report{mode, 0.0, 0.0, 0.0, true};

  if (mode == GcnLimit::LargeSigma) {
    spec.bandwidth = 1e8;
    report.bandwidth = spec.bandwidth;
    report.threshold = 1e-3;
    const GcnFactor factor(cloud, spec);
    // RMS length of a single displacement: K_ii = 1, so E|Y_i|^2 = d dt.
    const double magnitude = std::sqrt(static_cast<double>(d) * dt);
    RowMatrix draws(n, d);
    for (Index s = 0; s < n_samples; ++s) {
      rng.fill_normal(draws);
      const RowMatrix y = factor.apply(draws, std::sqrt(dt));
      double spread = 0.0;
      for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) spread = std::max(spread, (y.row(i) - y.row(j)).norm());
      report.statistic = std::max(report.statistic, spread / magnitude);
    }
  } else {
    spec.bandwidth = 1e-8;
    report.bandwidth = spec.bandwidth;
    report.threshold = 0.05;
    const GcnFactor factor(cloud, spec);
    // Running sums over draws for the N d x N d correlation matrix.
    const Index m = n * d;
    Vector sum = Vector::Zero(m);
    Matrix cross = Matrix::Zero(m, m);
    RowMatrix draws(n, d);
    for (Index s = 0; s < n_samples; ++s) {
      rng.fill_normal(draws);
      const RowMatrix y = factor.apply(draws, std::sqrt(dt));
      const Eigen::Map<const Vector> flat(y.data(), m);
      sum += flat;
      cross.selfadjointView<Eigen::Lower>().rankUpdate(flat);
    }
    cross = cross.selfadjointView<Eigen::Lower>();
    const double ns = static_cast<double>(n_samples);
    const Vector mean = sum / ns;
    const Matrix cov = cross / ns - mean * mean.transpose();
    for (Index a = 0; a < m; ++a) {
      for (Index b = 0; b < m; ++b) {
        if (a / d == b / d) continue;  // same particle
        const double denom = std::sqrt(cov(a, a) * cov(b, b));
        if (denom > 0.0)
          report.statistic = std::max(report.statistic, std::abs(cov(a, b)) / denom);
      }
    }
  }
  report.passed = report.statistic < report.threshold;
  return report;
}

}  // namespace mkvnoise
