#pragma once

#include "glle/common.hpp"
#include "glle/manifold_data.hpp"

#include <Eigen/Core>

#include <filesystem>

namespace glle {

using IndexMatrix = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// kNN graph. Row i holds the k nearest other points of i in ascending
/// Euclidean distance; equal distances are ordered by smaller index.
struct NeighborhoodGraph {
  Index k = 0;
  IndexMatrix indices;  // n x k

  Index size() const { return indices.rows(); }
};

/// Exhaustive O(n^2 d) search; requires 1 <= k <= n - 1.
NeighborhoodGraph build_knn(const Eigen::MatrixXd& points, Index k, int threads = 1);

inline NeighborhoodGraph build_knn(const Dataset& ds, Index k, int threads = 1) {
  return build_knn(ds.points, k, threads);
}

/// d x k matrix whose column j is the j-th listed neighbor of point i.
Eigen::MatrixXd neighbor_matrix(const NeighborhoodGraph& graph, const Eigen::MatrixXd& points,
                                Index i);

/// Debug dump: n rows of k neighbor indices, header n0..n{k-1}.
void save_graph_csv(const NeighborhoodGraph& graph, const std::filesystem::path& path);

}  // namespace glle
