#include "glle/glle_direct.hpp"

#include "glle/gaussian.hpp"
#include "glle/parallel.hpp"
#include "glle/random.hpp"

namespace glle {

namespace {
constexpr std::uint64_t kSampleTag = 0xd1;
}

Eigen::MatrixXd gamma(const Eigen::MatrixXd& neighbors_in, const Eigen::MatrixXd& neighbors_emb,
                      double reg) {
  require(neighbors_in.cols() == neighbors_emb.cols(), "gamma: X and Y must have k columns");
  require(reg >= 0.0, "gamma: reg must be >= 0");
  const Index k = neighbors_in.cols();
  Eigen::MatrixXd a = neighbors_in.transpose() * neighbors_in +
                      neighbors_emb.transpose() * neighbors_emb;
  a.diagonal().array() += reg * a.trace();
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-15))
    throw SingularMatrix("X^T X + Y^T Y is singular after regularization; increase reg");
  return symmetrized(llt.solve(Eigen::MatrixXd::Identity(k, k)));
}

Eigen::VectorXd conditional_mean(const Eigen::MatrixXd& neighbors_in,
                                 const Eigen::MatrixXd& neighbors_emb, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y, const Eigen::MatrixXd& gamma_i) {
  require(x.size() == neighbors_in.rows() && y.size() == neighbors_emb.rows(),
          "conditional_mean: point dimensions do not match the neighbor matrices");
  require(gamma_i.rows() == neighbors_in.cols() && gamma_i.cols() == neighbors_in.cols() &&
              neighbors_emb.cols() == neighbors_in.cols(),
          "conditional_mean: gamma must be k x k");
  return gamma_i * (neighbors_in.transpose() * x + neighbors_emb.transpose() * y);
}

DirectParams fit_direct(const Dataset& ds, const LleResult& lle, double reg, int threads) {
  const Index n = ds.size();
  require(lle.graph.size() == n && lle.embedding.coords.rows() == n,
          "fit_direct: LLE result does not match the dataset");
  const Index k = lle.graph.k;
  DirectParams out{std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(n)), lle.weights.rows,
                   Eigen::MatrixXd(n, k)};
  parallel_for(n, threads, [&](std::ptrdiff_t i) {
    const Eigen::MatrixXd X = neighbor_matrix(lle.graph, ds.points, i);
    const Eigen::MatrixXd Y = neighbor_matrix(lle.graph, lle.embedding.coords, i);
    auto& g = out.gamma[static_cast<std::size_t>(i)];
    try {
      g = gamma(X, Y, reg);
    } catch (const SingularMatrix& e) {
      throw SingularMatrix("point " + std::to_string(i) + ": " + e.what());
    }
    out.exact_means.row(i) = conditional_mean(X, Y, ds.points.row(i).transpose(),
                                              lle.embedding.coords.row(i).transpose(), g)
                                 .transpose();
  });
  return out;
}

WeightMatrix sample_direct(const DirectParams& params, double scale, std::uint64_t seed,
                           bool use_exact_mean, int threads) {
  require(scale >= 0.0, "sample_direct: scale must be >= 0");
  const Index n = params.w_lle.rows();
  const Eigen::MatrixXd& centers = use_exact_mean ? params.exact_means : params.w_lle;
  WeightMatrix w{Eigen::MatrixXd(n, params.w_lle.cols()), false};
  parallel_for(n, threads, [&](std::ptrdiff_t i) {
    Rng rng = point_stream(seed, static_cast<std::uint64_t>(i), kSampleTag);
    const GaussianParams<double> g{centers.row(i).transpose(),
                                   scale * params.gamma[static_cast<std::size_t>(i)]};
    w.rows.row(i) = sample_psd(g, rng).transpose();
  });
  return w;
}

DirectResult run_direct(const Dataset& ds, Index k, Index p, const DirectOptions& options) {
  require(options.scale > 0.0, "run_direct: scale must be > 0");
  DirectResult r;
  r.lle = lle_pipeline(ds, k, p, options.lle_reg, options.threads);
  r.params = fit_direct(ds, r.lle, options.reg, options.threads);
  r.weights = sample_direct(r.params, options.scale, options.seed, options.use_exact_mean,
                            options.threads);
  return r;
}

}  // namespace glle
