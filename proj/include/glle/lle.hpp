#pragma once

#include "glle/common.hpp"
#include "glle/manifold_data.hpp"
#include "glle/neighborhood.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <filesystem>
#include <string>

namespace glle {

/// Default Tikhonov factor for the local Gram solve, relative to tr(G).
inline constexpr double kDefaultLleReg = 1e-3;
/// Eigenvalues below this fraction of the largest are treated as null space.
inline constexpr double kNullSpaceCutoff = 1e-8;

/// Reconstruction weights, one row of k weights per point. `constrained`
/// records whether rows are guaranteed to sum to one.
struct WeightMatrix {
  Eigen::MatrixXd rows;  // n x k
  bool constrained = false;
};

struct Embedding {
  Eigen::MatrixXd coords;       // n x p, (1/n) Y^T Y = I, zero column means
  Eigen::VectorXd eigenvalues;  // p retained eigenvalues, ascending
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// G = (x 1^T - X)^T (x 1^T - X) for a point x (d) and its neighbors X (d x k).
template <typename DerivedX, typename DerivedN>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, Eigen::Dynamic> local_gram(
    const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedN>& neighbors) {
  using Scalar = typename DerivedX::Scalar;
  require(x.cols() == 1 && x.rows() == neighbors.rows(),
          "local_gram: x must be a column of the same dimension as the neighbors");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> diff =
      x.derived().replicate(1, neighbors.cols()) - neighbors;
  return diff.transpose() * diff;
}

/// Sum-to-one minimizer of w^T (G + reg tr(G) I) w, i.e. the normalized
/// solution of (G + reg tr(G) I) w = 1. Throws SingularMatrix if the
/// regularized Gram cannot be solved reliably.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> solve_weights(
    const Eigen::MatrixBase<Derived>& gram, double reg) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  require(gram.rows() == gram.cols() && gram.rows() >= 1, "solve_weights: G must be square, k >= 1");
  require(reg >= 0.0, "solve_weights: reg must be >= 0");
  const Eigen::Index k = gram.rows();
  if (k == 1) return Vector::Ones(1);

  Matrix g = gram;
  g.diagonal().array() += Scalar(reg) * gram.trace();
  Eigen::LDLT<Matrix> ldlt(g);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > Scalar(1e-14)))
    throw SingularMatrix("regularized local Gram matrix is singular; increase reg (reg=" +
                         std::to_string(reg) + ")");
  const Vector w = ldlt.solve(Vector::Ones(k));
  const Scalar total = w.sum();
  if (!std::isfinite(total) || std::abs(total) < Scalar(1e-300))
    throw SingularMatrix("weight normalizer vanished; increase reg");
  return w / total;
}

/// Row i = solve_weights(local_gram(x_i, X_i), reg). Errors name the point.
WeightMatrix reconstruct_all(const Dataset& ds, const NeighborhoodGraph& graph,
                             double reg = kDefaultLleReg, int threads = 1);

/// n x n matrix with W(i, graph.indices(i, j)) = rows(i, j), zero elsewhere.
SparseMatrix scatter_weights(const WeightMatrix& weights, const NeighborhoodGraph& graph);

/// M = (I - W)^T (I - W).
SparseMatrix embedding_matrix(const SparseMatrix& scattered);

/// Bottom eigenvectors of M restricted to the complement of the constant
/// vector, skipping the null space, scaled to unit covariance. Requires
/// 1 <= p <= n - 2.
Embedding embed(const SparseMatrix& m, Index p);

/// scatter -> M -> embed.
Embedding embed_weights(const WeightMatrix& weights, const NeighborhoodGraph& graph, Index p);

struct LleResult {
  Embedding embedding;
  WeightMatrix weights;
  NeighborhoodGraph graph;
};

LleResult lle_pipeline(const Dataset& ds, Index k, Index p, double reg = kDefaultLleReg,
                       int threads = 1);

/// Header `y0,...,y{p-1},param`.
void save_embedding_csv(const Embedding& emb, const Eigen::VectorXd& param,
                        const std::filesystem::path& path);

}  // namespace glle
