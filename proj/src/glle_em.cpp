#include "glle/glle_em.hpp"

#include "glle/csv.hpp"
#include "glle/parallel.hpp"
#include "glle/random.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace glle {

namespace {

constexpr std::uint64_t kSampleTag = 0x5a;

// Differential entropy of a possibly rank-deficient Gaussian, measured on
// its support.
double support_entropy(const Eigen::MatrixXd& cov) {
  if (cov.size() == 0) return 0.0;
  const Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov).eigenvalues();
  const double thresh = kPinvCutoff * lam.cwiseAbs().maxCoeff();
  double h = 0.0;
  for (Index j = 0; j < lam.size(); ++j)
    if (lam(j) > thresh) h += 0.5 * (1.0 + std::log(2.0 * std::numbers::pi * lam(j)));
  return h;
}

Eigen::MatrixXd inverse_pd(const Eigen::MatrixXd& a, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(a));
  if (llt.info() != Eigen::Success) throw SingularMatrix(std::string(what) + " is not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
}

double logdet_pd(const Eigen::MatrixXd& a, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrized(a));
  if (llt.info() != Eigen::Success) throw SingularMatrix(std::string(what) + " is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

Eigen::VectorXd data_mean(const Dataset& ds) {
  require(ds.size() >= 1, "data_mean: empty dataset");
  return ds.points.colwise().mean().transpose();
}

Scatters compute_scatters(const Dataset& ds, const NeighborhoodGraph& graph,
                          const Eigen::VectorXd& mu,
                          const std::vector<EStepResult<double>>& expectations) {
  const Index n = ds.size();
  require(graph.size() == n && static_cast<Index>(expectations.size()) == n,
          "compute_scatters: one expectation per point required");
  const Index d = ds.dim();
  Scatters s{Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(graph.k, graph.k)};
  for (Index i = 0; i < n; ++i) {
    const auto& e = expectations[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd X = neighbor_matrix(graph, ds.points, i);
    const Eigen::VectorXd r = ds.points.row(i).transpose() - mu;
    s.s1.noalias() += r * r.transpose();
    s.s1.noalias() -= 2.0 * (X * e.mean) * r.transpose();
    s.s1.noalias() += X * e.second_moment * X.transpose();
    s.s2 += e.second_moment;
  }
  s.s1 = symmetrized(s.s1 / static_cast<double>(n));
  s.s2 = symmetrized(s.s2 / static_cast<double>(n));
  return s;
}

double relaxed_coefficient(const Eigen::MatrixXd& neighbors, const Eigen::MatrixXd& s1,
                           const Eigen::MatrixXd& s2) {
  require(s1.rows() == neighbors.rows() && s2.rows() == neighbors.cols(),
          "relaxed_coefficient: scatter shapes do not match X");
  return (pseudo_inverse_sym(neighbors * neighbors.transpose()) * s1).trace() + s2.trace();
}

double relaxed_objective(double sigma, const Eigen::MatrixXd& neighbors, const Eigen::MatrixXd& s1,
                         const Eigen::MatrixXd& s2) {
  require(sigma > 0.0, "relaxed_objective: sigma must be positive");
  const double dk = static_cast<double>(neighbors.rows() + neighbors.cols());
  return -0.5 * (dk * std::log(sigma) + relaxed_coefficient(neighbors, s1, s2) / sigma);
}

double m_step_sigma(const Eigen::MatrixXd& neighbors, const Eigen::MatrixXd& s1,
                    const Eigen::MatrixXd& s2) {
  const double dk = static_cast<double>(neighbors.rows() + neighbors.cols());
  const double sigma = relaxed_coefficient(neighbors, s1, s2) / dk;
  return std::isnan(sigma) ? sigma : std::max(sigma, kSigmaFloor);
}

double joint_objective(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& neighbors,
                       const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2) {
  const Eigen::MatrixXd a = neighbors * omega * neighbors.transpose();
  return -0.5 * logdet_pd(a, "X omega X^T") - 0.5 * (inverse_pd(a, "X omega X^T") * s1).trace() -
         0.5 * logdet_pd(omega, "omega") - 0.5 * (inverse_pd(omega, "omega") * s2).trace();
}

Eigen::MatrixXd full_cov_gradient(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& neighbors,
                                  const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2) {
  const Index d = neighbors.rows();
  const Index k = neighbors.cols();
  require(omega.rows() == k && omega.cols() == k, "full_cov_gradient: omega must be k x k");
  require(s1.rows() == d && s1.cols() == d && s2.rows() == k && s2.cols() == k,
          "full_cov_gradient: scatter shapes do not match X");
  const Eigen::MatrixXd a_inv = inverse_pd(neighbors * omega * neighbors.transpose(), "X omega X^T");
  const Eigen::MatrixXd b = a_inv * neighbors * omega;  // d x k
  return 0.5 * (omega * neighbors.transpose() * b - b.transpose() * s1 * b + omega - s2);
}

WeightMatrix sample_em_weights(const EmState& state, double scale, std::uint64_t seed, int threads) {
  require(scale >= 0.0, "sample_em_weights: scale must be >= 0");
  const Index n = state.post_means.rows();
  require(static_cast<Index>(state.post_covs.size()) == n, "sample_em_weights: inconsistent state");
  WeightMatrix w{Eigen::MatrixXd(n, state.post_means.cols()), false};
  parallel_for(n, threads, [&](std::ptrdiff_t i) {
    Rng rng = point_stream(seed, static_cast<std::uint64_t>(i), kSampleTag);
    const GaussianParams<double> g{state.post_means.row(i).transpose(),
                                   scale * state.post_covs[static_cast<std::size_t>(i)]};
    w.rows.row(i) = sample_psd(g, rng).transpose();
  });
  return w;
}

EmResult run_em(const Dataset& ds, const NeighborhoodGraph& graph, const EmOptions& options) {
  validate(ds);
  require(graph.size() == ds.size(), "run_em: graph was not built from this dataset");
  require(options.max_iter >= 1, "run_em: max_iter must be >= 1");
  require(options.tol > 0.0, "run_em: tol must be > 0");

  const Index n = ds.size();
  const Index d = ds.dim();
  const Index k = graph.k;
  const double dk = static_cast<double>(d + k);

  std::vector<Eigen::MatrixXd> neighbors(static_cast<std::size_t>(n));
  std::vector<Eigen::MatrixXd> gram_pinv(static_cast<std::size_t>(n));
  parallel_for(n, options.threads, [&](std::ptrdiff_t i) {
    auto& X = neighbors[static_cast<std::size_t>(i)];
    X = neighbor_matrix(graph, ds.points, i);
    gram_pinv[static_cast<std::size_t>(i)] = pseudo_inverse_sym(X * X.transpose());
  });

  EmResult result;
  EmState& st = result.state;
  st.mu = data_mean(ds);
  st.sigmas = Eigen::VectorXd::Ones(n);
  st.post_means.resize(n, k);
  st.post_covs.resize(static_cast<std::size_t>(n));

  std::vector<EStepResult<double>> expect(static_cast<std::size_t>(n));
  Eigen::VectorXd entropy(n);
  auto run_e_step = [&](Index iteration) {
    parallel_for(n, options.threads, [&](std::ptrdiff_t i) {
      const auto ui = static_cast<std::size_t>(i);
      const Eigen::MatrixXd omega = st.sigmas(i) * Eigen::MatrixXd::Identity(k, k);
      expect[ui] = e_step(ds.points.row(i).transpose(), neighbors[ui], st.mu, omega,
                          options.second_moment);
      if (!expect[ui].mean.allFinite() || !expect[ui].second_moment.allFinite())
        throw NumericalFailure("non-finite posterior at iteration " + std::to_string(iteration) +
                               ", point " + std::to_string(i));
      st.post_means.row(i) = expect[ui].mean.transpose();
      st.post_covs[ui] = expect[ui].cov;
      entropy(i) = support_entropy(expect[ui].cov);
    });
  };

  for (Index it = 1; it <= options.max_iter; ++it) {
    run_e_step(it);
    if (options.sample_every_iteration)
      result.weights = sample_em_weights(st, options.scale, options.seed, options.threads);

    const Scatters sc = compute_scatters(ds, graph, st.mu, expect);

    Eigen::VectorXd next(n);
    Eigen::VectorXd point_objective(n);
    parallel_for(n, options.threads, [&](std::ptrdiff_t i) {
      const auto ui = static_cast<std::size_t>(i);
      const double c = (gram_pinv[ui] * sc.s1).trace() + sc.s2.trace();
      const double sigma = std::max(c / dk, kSigmaFloor);
      if (!std::isfinite(sigma))
        throw NumericalFailure("non-finite sigma at iteration " + std::to_string(it) + ", point " +
                               std::to_string(i));
      next(i) = sigma;
      point_objective(i) = -0.5 * (dk * std::log(sigma) + c / sigma) + entropy(i);
    });

    const double delta = (next - st.sigmas).cwiseAbs().maxCoeff();
    st.sigmas = next;
    st.iteration = it;
    result.trace.rows.push_back({it, point_objective.mean(), delta});
    if (delta < options.tol) {
      result.trace.converged = true;
      break;
    }
  }

  // Posterior under the final sigmas.
  if (!options.sample_every_iteration) {
    run_e_step(st.iteration + 1);
    result.weights = sample_em_weights(st, options.scale, options.seed, options.threads);
  }
  result.weights.constrained = false;
  return result;
}

void save_trace_csv(const EmTrace& trace, const std::filesystem::path& path) {
  Eigen::MatrixXd table(static_cast<Index>(trace.rows.size()), 3);
  for (std::size_t r = 0; r < trace.rows.size(); ++r)
    table.row(static_cast<Index>(r)) << static_cast<double>(trace.rows[r].iteration),
        trace.rows[r].objective, trace.rows[r].max_delta_sigma;
  csv::write_table(path, {"iter", "objective", "max_delta_sigma"}, table);
}

}  // namespace glle
