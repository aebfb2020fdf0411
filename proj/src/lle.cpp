#include "glle/lle.hpp"

#include "glle/csv.hpp"
#include "glle/parallel.hpp"

#include <cmath>
#include <vector>

namespace glle {

WeightMatrix reconstruct_all(const Dataset& ds, const NeighborhoodGraph& graph, double reg,
                             int threads) {
  require(graph.size() == ds.size(), "graph was not built from this dataset");
  WeightMatrix out{Eigen::MatrixXd(ds.size(), graph.k), true};
  parallel_for(ds.size(), threads, [&](std::ptrdiff_t i) {
    const Eigen::MatrixXd X = neighbor_matrix(graph, ds.points, i);
    const Eigen::VectorXd x = ds.points.row(i).transpose();
    try {
      out.rows.row(i) = solve_weights(local_gram(x, X), reg).transpose();
    } catch (const SingularMatrix& e) {
      throw SingularMatrix("point " + std::to_string(i) + ": " + e.what());
    }
  });
  return out;
}

SparseMatrix scatter_weights(const WeightMatrix& weights, const NeighborhoodGraph& graph) {
  require(weights.rows.rows() == graph.size() && weights.rows.cols() == graph.k,
          "weight matrix shape does not match the graph");
  const Index n = graph.size();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n * graph.k));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < graph.k; ++j)
      triplets.emplace_back(i, graph.indices(i, j), weights.rows(i, j));
  SparseMatrix w(n, n);
  w.setFromTriplets(triplets.begin(), triplets.end());
  return w;
}

SparseMatrix embedding_matrix(const SparseMatrix& scattered) {
  require(scattered.rows() == scattered.cols(), "embedding_matrix: input must be square");
  SparseMatrix eye(scattered.rows(), scattered.cols());
  eye.setIdentity();
  const SparseMatrix r = eye - scattered;
  SparseMatrix m = SparseMatrix(r.transpose()) * r;
  return m;
}

Embedding embed(const SparseMatrix& m, Index p) {
  const Index n = m.rows();
  require(m.cols() == n, "embed: M must be square");
  require(p >= 1 && p <= n - 2, "embed: p must satisfy 1 <= p <= n - 2");

  // Project onto the zero-mean subspace: P M P with P = I - 11^T/n.
  Eigen::MatrixXd dense = Eigen::MatrixXd(m);
  dense = 0.5 * (dense + dense.transpose()).eval();
  const Eigen::VectorXd c = dense.rowwise().mean();
  const double cc = c.mean();
  dense.colwise() -= c;
  dense.rowwise() -= c.transpose();
  dense.array() += cc;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success) throw NumericalFailure("embed: eigensolver did not converge");
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double thresh = kNullSpaceCutoff * lam(n - 1);

  std::vector<Index> keep;
  Index null_dim = 0;
  for (Index j = 0; j < n; ++j) {
    if (lam(j) <= thresh)
      ++null_dim;
    else if (static_cast<Index>(keep.size()) < p)
      keep.push_back(j);
  }
  if (static_cast<Index>(keep.size()) < p)
    throw InvalidArgument("embed: p=" + std::to_string(p) + " too large; null space has dimension " +
                          std::to_string(null_dim) + " of n=" + std::to_string(n));

  // Eigenvectors next to the constant null vector lose orthogonality to it at
  // the level eps * lambda_max / gap; remove that drift and re-orthonormalize.
  Eigen::MatrixXd basis(n, p);
  for (Index c2 = 0; c2 < p; ++c2) basis.col(c2) = es.eigenvectors().col(keep[static_cast<std::size_t>(c2)]);
  basis.rowwise() -= basis.colwise().mean();
  for (Index c2 = 0; c2 < p; ++c2) {
    for (int pass = 0; pass < 2; ++pass)
      for (Index prev = 0; prev < c2; ++prev)
        basis.col(c2) -= basis.col(prev).dot(basis.col(c2)) * basis.col(prev);
    basis.col(c2).normalize();
  }

  Embedding emb{Eigen::MatrixXd(n, p), Eigen::VectorXd(p)};
  const double root_n = std::sqrt(static_cast<double>(n));
  for (Index c2 = 0; c2 < p; ++c2) {
    Eigen::VectorXd v = basis.col(c2);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    emb.coords.col(c2) = root_n * v;
    emb.eigenvalues(c2) = lam(keep[static_cast<std::size_t>(c2)]);
  }
  return emb;
}

Embedding embed_weights(const WeightMatrix& weights, const NeighborhoodGraph& graph, Index p) {
  return embed(embedding_matrix(scatter_weights(weights, graph)), p);
}

LleResult lle_pipeline(const Dataset& ds, Index k, Index p, double reg, int threads) {
  validate(ds);
  NeighborhoodGraph graph = build_knn(ds, k, threads);
  WeightMatrix weights = reconstruct_all(ds, graph, reg, threads);
  Embedding emb = embed_weights(weights, graph, p);
  return {std::move(emb), std::move(weights), std::move(graph)};
}

void save_embedding_csv(const Embedding& emb, const Eigen::VectorXd& param,
                        const std::filesystem::path& path) {
  require(param.size() == emb.coords.rows(), "param length must match the embedding");
  std::vector<std::string> header;
  for (Index j = 0; j < emb.coords.cols(); ++j) header.push_back("y" + std::to_string(j));
  header.emplace_back("param");
  Eigen::MatrixXd table(emb.coords.rows(), emb.coords.cols() + 1);
  table << emb.coords, param;
  csv::write_table(path, header, table);
}

}  // namespace glle
