#pragma once

// Stochastic linear reconstruction fitted by expectation maximization.
//
// Model per point i: x_i = X_i w_i + mu with prior w_i ~ N(0, Omega_i), so
// [x_i; w_i] is jointly Gaussian with blocks
//   [X Omega X^T, X Omega; Omega X^T, Omega].
// The E-step conditions w_i on x_i; the M-step restricts Omega_i = sigma_i I
// and updates sigma_i in closed form from the pooled scatters S1, S2.

#include "glle/common.hpp"
#include "glle/gaussian.hpp"
#include "glle/lle.hpp"
#include "glle/manifold_data.hpp"
#include "glle/neighborhood.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace glle {

inline constexpr double kSigmaFloor = 1e-12;

/// How E[w w^T] is formed from the posterior.
enum class SecondMoment {
  kStandard,  // Sigma_{w|x} + mu_{w|x} mu_{w|x}^T
  kLiteral,   // Sigma_{w|x} alone
};

template <typename Scalar = double>
struct EStepResult {
  Vec<Scalar> mean;          // E[w | x]
  Mat<Scalar> cov;           // Cov[w | x]
  Mat<Scalar> second_moment; // E[w w^T | x] under the chosen convention
};

/// Posterior moments of w given x for prior covariance omega.
template <typename DX, typename DN, typename DM, typename DO>
EStepResult<typename DX::Scalar> e_step(const Eigen::MatrixBase<DX>& x,
                                        const Eigen::MatrixBase<DN>& neighbors,
                                        const Eigen::MatrixBase<DM>& mu,
                                        const Eigen::MatrixBase<DO>& omega,
                                        SecondMoment mode = SecondMoment::kStandard) {
  using Scalar = typename DX::Scalar;
  const Eigen::Index d = neighbors.rows();
  const Eigen::Index k = neighbors.cols();
  require(x.size() == d && mu.size() == d, "e_step: x and mu must have dimension d");
  require(omega.rows() == k && omega.cols() == k, "e_step: omega must be k x k");

  const Mat<Scalar> omega_xt = omega.transpose() * neighbors.transpose();  // k x d
  const Mat<Scalar> gain = omega_xt * pseudo_inverse_sym(neighbors * omega * neighbors.transpose());
  EStepResult<Scalar> r;
  r.mean = gain * (x - mu);
  r.cov = symmetrized(omega - gain * neighbors * omega);
  r.second_moment = r.cov;
  if (mode == SecondMoment::kStandard) r.second_moment += r.mean * r.mean.transpose();
  return r;
}

struct Scatters {
  Eigen::MatrixXd s1;  // d x d
  Eigen::MatrixXd s2;  // k x k
};

Eigen::VectorXd data_mean(const Dataset& ds);

/// Pooled scatters averaged over all points, accumulated in index order and
/// symmetrized.
Scatters compute_scatters(const Dataset& ds, const NeighborhoodGraph& graph,
                          const Eigen::VectorXd& mu,
                          const std::vector<EStepResult<double>>& expectations);

/// tr((X X^T)^+ S1) + tr(S2): the coefficient of 1/sigma in the relaxed objective.
double relaxed_coefficient(const Eigen::MatrixXd& neighbors, const Eigen::MatrixXd& s1,
                           const Eigen::MatrixXd& s2);

/// Per-point relaxed objective -1/2 [(d + k) log sigma + c / sigma], constants
/// dropped, with c from relaxed_coefficient.
double relaxed_objective(double sigma, const Eigen::MatrixXd& neighbors, const Eigen::MatrixXd& s1,
                         const Eigen::MatrixXd& s2);

/// Closed-form maximizer of relaxed_objective, floored at kSigmaFloor.
double m_step_sigma(const Eigen::MatrixXd& neighbors, const Eigen::MatrixXd& s1,
                    const Eigen::MatrixXd& s2);

/// Per-point expected joint log-likelihood for a full covariance omega,
/// constants dropped:
///   -1/2 log|X omega X^T| - 1/2 tr((X omega X^T)^-1 S1) - 1/2 log|omega| - 1/2 tr(omega^-1 S2).
/// Requires omega and X omega X^T positive definite.
double joint_objective(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& neighbors,
                       const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2);

/// Gradient of joint_objective with respect to omega^-1 (the n = 1 case).
/// With A = X omega X^T:
///   1/2 [omega X^T A^-1 X omega - omega X^T A^-1 S1 A^-1 X omega + omega - S2].
Eigen::MatrixXd full_cov_gradient(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& neighbors,
                                  const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2);

struct EmOptions {
  Index max_iter = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  /// Multiplies the posterior covariance at sampling time only.
  double scale = 1.0;
  SecondMoment second_moment = SecondMoment::kStandard;
  /// Draw weights inside every iteration instead of once after convergence.
  /// Draws never feed back into the fit.
  bool sample_every_iteration = false;
  int threads = 1;
};

struct EmState {
  Eigen::VectorXd sigmas;              // n
  Eigen::MatrixXd post_means;          // n x k
  std::vector<Eigen::MatrixXd> post_covs;
  Eigen::VectorXd mu;                  // d
  Index iteration = 0;
};

struct EmTraceRow {
  Index iteration = 0;
  /// Mean over points of the relaxed objective at the updated sigma plus the
  /// entropy of the E-step posterior. Non-decreasing under EM.
  double objective = 0.0;
  double max_delta_sigma = 0.0;
};

struct EmTrace {
  std::vector<EmTraceRow> rows;
  bool converged = false;
};

struct EmResult {
  WeightMatrix weights;
  EmState state;
  EmTrace trace;
};

EmResult run_em(const Dataset& ds, const NeighborhoodGraph& graph, const EmOptions& options = {});

/// w_i ~ N(post_mean_i, scale * post_cov_i), stream (seed, i).
WeightMatrix sample_em_weights(const EmState& state, double scale, std::uint64_t seed,
                               int threads = 1);

/// Header iter,objective,max_delta_sigma.
void save_trace_csv(const EmTrace& trace, const std::filesystem::path& path);

}  // namespace glle
