#pragma once

// Multivariate Gaussian utilities over Eigen dense types. Covariances may be
// rank-deficient, so pseudo-inverses and factorizations go through the
// symmetric eigendecomposition.

#include "glle/common.hpp"
#include "glle/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace glle {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Relative spectral cutoff used for pseudo-inverses.
inline constexpr double kPinvCutoff = 1e-10;

template <typename Derived>
auto symmetrized(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  return Mat<Scalar>((a + a.transpose()) * Scalar(0.5));
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix. Eigenvalues with
/// |lambda| <= cutoff * max|lambda| are treated as zero.
template <typename Derived>
Mat<typename Derived::Scalar> pseudo_inverse_sym(const Eigen::MatrixBase<Derived>& a,
                                                 double cutoff = kPinvCutoff) {
  using Scalar = typename Derived::Scalar;
  require(a.rows() == a.cols(), "pseudo_inverse_sym: matrix must be square");
  if (a.size() == 0) return Mat<Scalar>(a.rows(), a.cols());
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(symmetrized(a));
  const auto& lam = es.eigenvalues();
  const Scalar thresh = Scalar(cutoff) * lam.cwiseAbs().maxCoeff();
  Vec<Scalar> inv(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    inv(i) = std::abs(lam(i)) > thresh ? Scalar(1) / lam(i) : Scalar(0);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

template <typename Scalar = double>
struct GaussianParams {
  Vec<Scalar> mean;
  Mat<Scalar> cov;

  Eigen::Index dim() const { return mean.size(); }
};

template <typename Scalar>
void check_shape(const GaussianParams<Scalar>& g) {
  require(g.cov.rows() == g.mean.size() && g.cov.cols() == g.mean.size(),
          "gaussian: covariance must be m x m with m = mean size");
}

/// log N(x; mean, cov). Requires cov strictly PD (smallest eigenvalue above
/// 1e-12 times the largest); throws SingularMatrix otherwise.
template <typename Scalar, typename Derived>
Scalar log_pdf(const Eigen::MatrixBase<Derived>& x, const GaussianParams<Scalar>& g) {
  check_shape(g);
  require(x.size() == g.dim(), "log_pdf: x has wrong dimension");
  const Eigen::Index m = g.dim();
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(symmetrized(g.cov));
  const auto& lam = es.eigenvalues();
  if (m == 0) return Scalar(0);
  if (!(lam(0) > Scalar(1e-12) * lam(m - 1)) || !(lam(m - 1) > Scalar(0)))
    throw SingularMatrix("log_pdf: covariance is not positive definite");
  const Vec<Scalar> z = es.eigenvectors().transpose() * (x - g.mean);
  const Scalar quad = (z.array().square() / lam.array()).sum();
  const Scalar logdet = lam.array().log().sum();
  return Scalar(-0.5) * (Scalar(m) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>) + logdet + quad);
}

/// Distribution of the second block given the first block equals
/// `observed_first`. The first block's covariance is pseudo-inverted, so
/// singular blocks are allowed.
template <typename Scalar, typename Derived>
GaussianParams<Scalar> condition(const GaussianParams<Scalar>& joint, Eigen::Index m1,
                                 const Eigen::MatrixBase<Derived>& observed_first) {
  check_shape(joint);
  const Eigen::Index m = joint.dim();
  require(m1 >= 0 && m1 <= m, "condition: split out of range");
  require(observed_first.size() == m1, "condition: observed block has wrong dimension");
  const Eigen::Index m2 = m - m1;
  const auto s11 = joint.cov.topLeftCorner(m1, m1);
  const auto s21 = joint.cov.bottomLeftCorner(m2, m1);
  const auto s22 = joint.cov.bottomRightCorner(m2, m2);
  const Mat<Scalar> gain = s21 * pseudo_inverse_sym(s11);
  GaussianParams<Scalar> out;
  out.mean = joint.mean.tail(m2) + gain * (observed_first - joint.mean.head(m1));
  out.cov = symmetrized(s22 - gain * s21.transpose());
  return out;
}

/// Precomputed symmetric factor cov = F F^T with F = E sqrt(max(D, 0)) E^T. Reusable for
/// many draws from the same distribution.
template <typename Scalar = double>
class GaussianSampler {
 public:
  explicit GaussianSampler(const GaussianParams<Scalar>& g) : mean_(g.mean) {
    check_shape(g);
    if (g.dim() > 0 && (g.cov - g.cov.transpose()).cwiseAbs().maxCoeff() >
                           Scalar(1e-10) * g.cov.cwiseAbs().maxCoeff())
      throw InvalidArgument("sample_psd: covariance is not symmetric");
    if (g.dim() == 0) {
      factor_.resize(0, 0);
      return;
    }
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(symmetrized(g.cov));
    // Eigenvalues at round-off level are zero directions of the support.
    const Scalar noise = Scalar(g.dim()) * std::numeric_limits<Scalar>::epsilon() *
                         es.eigenvalues().cwiseAbs().maxCoeff();
    const Vec<Scalar> root =
        (es.eigenvalues().array() > noise).select(es.eigenvalues(), Scalar(0)).cwiseSqrt();
    // Symmetric square root: unlike V sqrt(L) alone it does not depend on the
    // basis chosen inside repeated eigenvalues, so draws are continuous in cov.
    factor_ = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  }

  Vec<Scalar> operator()(Rng& rng) const {
    return mean_ + factor_ * standard_normal<Scalar>(mean_.size(), rng);
  }

  const Mat<Scalar>& factor() const { return factor_; }

 private:
  Vec<Scalar> mean_;
  Mat<Scalar> factor_;
};

/// One draw from N(mean, cov) for PSD cov. Negative and round-off-level
/// eigenvalues are clipped to zero.
template <typename Scalar>
Vec<Scalar> sample_psd(const GaussianParams<Scalar>& g, Rng& rng) {
  return GaussianSampler<Scalar>(g)(rng);
}

}  // namespace glle
