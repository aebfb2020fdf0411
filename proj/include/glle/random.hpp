#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace glle {

using Rng = std::mt19937_64;

/// Independent stream for (seed, index, tag). Streams depend only on their
/// key, never on scheduling order, so parallel loops stay reproducible.
inline Rng point_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(tag)};
  return Rng(seq);
}

template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> standard_normal(Eigen::Index m, Rng& rng) {
  std::normal_distribution<Scalar> dist;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z(m);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = dist(rng);
  return z;
}

}  // namespace glle
