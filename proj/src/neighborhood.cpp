#include "glle/neighborhood.hpp"

#include "glle/parallel.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <vector>

namespace glle {

NeighborhoodGraph build_knn(const Eigen::MatrixXd& points, Index k, int threads) {
  const Index n = points.rows();
  require(k >= 1, "k must be >= 1");
  require(k <= n - 1, "k must be <= n - 1 (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  require(points.allFinite(), "points must be finite");

  NeighborhoodGraph graph{k, IndexMatrix(n, k)};
  parallel_for(n, threads, [&](std::ptrdiff_t i) {
    std::vector<std::pair<double, Index>> cand;
    cand.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      cand.emplace_back((points.row(j) - points.row(i)).squaredNorm(), j);
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    for (Index j = 0; j < k; ++j) graph.indices(i, j) = cand[static_cast<std::size_t>(j)].second;
  });
  return graph;
}

Eigen::MatrixXd neighbor_matrix(const NeighborhoodGraph& graph, const Eigen::MatrixXd& points,
                                Index i) {
  require(i >= 0 && i < graph.size(), "point index out of range");
  require(points.rows() == graph.size(), "graph and points disagree on n");
  Eigen::MatrixXd X(points.cols(), graph.k);
  for (Index j = 0; j < graph.k; ++j) X.col(j) = points.row(graph.indices(i, j)).transpose();
  return X;
}

void save_graph_csv(const NeighborhoodGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (Index j = 0; j < graph.k; ++j) out << (j ? "," : "") << 'n' << j;
  out << '\n';
  for (Index i = 0; i < graph.size(); ++i) {
    for (Index j = 0; j < graph.k; ++j) out << (j ? "," : "") << graph.indices(i, j);
    out << '\n';
  }
}

}  // namespace glle
