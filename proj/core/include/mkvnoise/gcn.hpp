#pragma once

// Geometric Common Noise: the Gaussian random field with covariance
// k_sigma(x, y) I_d evaluated at the particle positions. Its Nd x Nd
// covariance is K (x) I_d, so a draw is sqrt(K) * Xi with Xi an N x d
// standard Gaussian matrix; only the N x N square root is ever formed.

#include <string_view>
#include <utility>
#include <vector>

#include "mkvnoise/core.hpp"
#include "mkvnoise/rng.hpp"

namespace mkvnoise {

struct GcnSpec {
  double bandwidth = 1.0;       // sigma of k(x, y) = exp(-|x - y|^2 / sigma)
  double beta = 1.0;            // intensity
  double eig_clamp_rel = 1e-10; // eigenvalues below this fraction of the largest are zeroed
  /// Recompute the square root every this many steps; values above 1 reuse
  /// a stale factor and are an approximation.
  int sqrt_refresh_every = 1;
};

void validate(const GcnSpec& spec);

/// K_ij = k_sigma(x_i, x_j).
Matrix gram_matrix(const ParticleCloud& cloud, double bandwidth);

/// Symmetric PSD square root through an eigendecomposition, with
/// eigenvalues below clamp_rel * lambda_max set to zero. Throws InvalidInput
/// when K is not symmetric to 1e-10.
Matrix psd_sqrt(const Matrix& K, double clamp_rel = 1e-10);

struct KernelGram {
  Matrix K;
  Matrix sqrt_K;
};

KernelGram make_kernel_gram(const ParticleCloud& cloud, const GcnSpec& spec);

/// sqrt(K) built in a canonical particle order (lexicographic in the
/// coordinates), so that relabelling particles permutes the output rows
/// exactly, bit for bit.
class GcnFactor {
 public:
  GcnFactor() = default;
  GcnFactor(const ParticleCloud& cloud, const GcnSpec& spec);

  bool empty() const noexcept { return order_.empty(); }
  Index size() const noexcept { return static_cast<Index>(order_.size()); }

  /// scale * sqrt(K) * draws, rows indexed like the cloud the factor was built from.
  RowMatrix apply(const RowMatrix& draws, double scale) const;

  /// sqrt(K) in the original particle order.
  Matrix sqrt_K() const;

 private:
  std::vector<Index> order_;  // order_[k] = particle at canonical position k
  std::vector<std::pair<Index, Index>> ties_;  // [begin, end) runs of coincident particles
  Matrix sqrt_sorted_;
};

/// sqrt(dt) * beta * sqrt(K) * draws for a given N x d standard Gaussian draw.
RowMatrix gcn_displacement(const ParticleCloud& cloud, const GcnSpec& spec, double dt,
                           const RowMatrix& draws);

/// Draws Xi (N x d, row-major order) from rng and returns the displacement.
RowMatrix sample_gcn(const ParticleCloud& cloud, const GcnSpec& spec, double dt, RngStream& rng);

enum class GcnLimit {
  LargeSigma,  // sigma = 1e8: every particle gets the same increment
  SmallSigma,  // sigma = 1e-8: increments are independent across particles
};

struct GcnLimitReport {
  GcnLimit mode;
  double bandwidth;
  /// LargeSigma: max over draws of max_ij |Y_i - Y_j| / sqrt(d dt), the
  /// denominator being the RMS length of one displacement.
  /// SmallSigma: max over particle pairs and coordinates of |corr(Y_i, Y_j)|.
  double statistic;
  double threshold;
  bool passed;
};

GcnLimitReport gcn_limit_check(GcnLimit mode, const ParticleCloud& cloud, double dt,
                               Index n_samples, RngStream& rng);

std::string_view limit_name(GcnLimit mode);

}  // namespace mkvnoise
