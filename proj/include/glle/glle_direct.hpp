#pragma once

// Stochastic linear reconstruction by direct sampling. Starting from a
// deterministic LLE run, each point's weights get the Gaussian that
// reconstructs it jointly in input and embedded space,
//   Gamma_i = (X_i^T X_i + Y_i^T Y_i)^-1,
// and are sampled around the LLE weights with covariance scale * Gamma_i.

#include "glle/common.hpp"
#include "glle/lle.hpp"
#include "glle/manifold_data.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace glle {

/// Default Tikhonov factor inside gamma, relative to the trace.
inline constexpr double kDefaultGammaReg = 1e-6;

/// (X^T X + Y^T Y + reg tr(.) I)^-1. Throws SingularMatrix if the
/// regularized matrix is not positive definite.
Eigen::MatrixXd gamma(const Eigen::MatrixXd& neighbors_in, const Eigen::MatrixXd& neighbors_emb,
                      double reg = kDefaultGammaReg);

/// Gamma (X^T x + Y^T y): minimizer of ||x - X w||^2 + ||y - Y w||^2 when
/// gamma is the unregularized inverse.
Eigen::VectorXd conditional_mean(const Eigen::MatrixXd& neighbors_in,
                                 const Eigen::MatrixXd& neighbors_emb, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y, const Eigen::MatrixXd& gamma_i);

struct DirectParams {
  std::vector<Eigen::MatrixXd> gamma;  // n of k x k
  Eigen::MatrixXd w_lle;               // n x k
  Eigen::MatrixXd exact_means;         // n x k
};

struct DirectOptions {
  std::uint64_t seed = 0;
  double scale = 1.0;
  double reg = kDefaultGammaReg;
  double lle_reg = kDefaultLleReg;
  /// Center samples on exact_means instead of the LLE weights.
  bool use_exact_mean = false;
  int threads = 1;
};

/// Gamma_i and both candidate means from a finished LLE run.
DirectParams fit_direct(const Dataset& ds, const LleResult& lle, double reg = kDefaultGammaReg,
                        int threads = 1);

/// w_i ~ N(center_i, scale * Gamma_i), stream (seed, i).
WeightMatrix sample_direct(const DirectParams& params, double scale, std::uint64_t seed,
                           bool use_exact_mean = false, int threads = 1);

struct DirectResult {
  WeightMatrix weights;
  DirectParams params;
  LleResult lle;
};

DirectResult run_direct(const Dataset& ds, Index k, Index p, const DirectOptions& options = {});

}  // namespace glle
