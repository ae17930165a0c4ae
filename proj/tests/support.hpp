#pragma once

#include "mkvnoise/core.hpp"
#include "oracles.hpp"

namespace test_support {

inline mkvnoise::ParticleCloud to_cloud(const oracle::Points& pts) {
  mkvnoise::RowMatrix m(static_cast<Eigen::Index>(pts.size()),
                        static_cast<Eigen::Index>(pts.front().size()));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pts[i][j];
  return mkvnoise::ParticleCloud(std::move(m));
}

inline oracle::Points to_points(const mkvnoise::ParticleCloud& cloud) {
  oracle::Points p(static_cast<std::size_t>(cloud.size()),
                   std::vector<double>(static_cast<std::size_t>(cloud.dim())));
  for (Eigen::Index i = 0; i < cloud.size(); ++i)
    for (Eigen::Index j = 0; j < cloud.dim(); ++j)
      p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cloud.positions()(i, j);
  return p;
}

inline mkvnoise::ParticleCloud cloud_1d(std::initializer_list<double> xs) {
  mkvnoise::RowMatrix m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return mkvnoise::ParticleCloud(std::move(m));
}

}  // namespace test_support
