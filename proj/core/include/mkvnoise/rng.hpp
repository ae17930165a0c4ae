#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace mkvnoise {

enum class StreamPurpose : std::uint64_t {
  Initialization = 1,
  ParticleNoise = 2,
  CommonNoise = 3,
};

/// Deterministic random stream keyed by (seed, stream_id).
///
/// Draws are produced by mt19937_64 (fully specified by the standard) and
/// converted to uniforms and normals by code in this library, so the
/// sequence does not depend on the standard library's distribution
/// implementations. Sub-streams for distinct purposes are derived by mixing
/// the purpose tag into the stream id, which keeps e.g. the per-particle
/// noise sequence unchanged when a common-noise channel is switched on.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  RngStream substream(StreamPurpose purpose) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double low, double high) { return low + (high - low) * uniform(); }
  double normal();

  template <typename Derived>
  void fill_normal(Eigen::DenseBase<Derived>& out) {
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = normal();
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace mkvnoise
