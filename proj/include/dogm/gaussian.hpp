#ifndef DOGM_GAUSSIAN_HPP_
#define DOGM_GAUSSIAN_HPP_

#include "dogm/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>

namespace dogm
{

/// Zero-mean scalar Gaussian scaled so that its peak is 1.
template <typename Scalar>
Scalar peak_gaussian(Scalar d, Scalar sigma)
{
  const Scalar z = d / sigma;
  return std::exp(Scalar(-0.5) * z * z);
}

/// N-dimensional Gaussian kernel exp(-1/2 (x-mu)^T Sigma^-1 (x-mu)), peak value 1.
///
/// The covariance is factored once at construction; a matrix that is not
/// symmetric positive definite is rejected there and never at evaluation time.
template <typename Scalar, int N>
class PeakGaussian
{
public:
  using VectorType = Eigen::Matrix<Scalar, N, 1>;
  using MatrixType = Eigen::Matrix<Scalar, N, N>;

  PeakGaussian() : PeakGaussian(MatrixType::Identity()) {}

  explicit PeakGaussian(const MatrixType & covariance, const VectorType & mean = VectorType::Zero())
  : mean_(mean), covariance_(covariance)
  {
    if (!covariance.allFinite() || !covariance.isApprox(covariance.transpose())) {
      throw ConfigError("covariance must be finite and symmetric");
    }
    llt_.compute(covariance);
    if (llt_.info() != Eigen::Success || !(llt_.matrixL().toDenseMatrix().diagonal().array() > Scalar(0)).all()) {
      throw ConfigError("covariance must be positive definite");
    }
  }

  const VectorType & mean() const { return mean_; }
  const MatrixType & covariance() const { return covariance_; }

  /// Same shape, different mean; reuses the factorization.
  PeakGaussian centered_at(const VectorType & mean) const
  {
    PeakGaussian g = *this;
    g.mean_ = mean;
    return g;
  }

  template <typename Derived>
  Scalar squared_mahalanobis(const Eigen::MatrixBase<Derived> & x) const
  {
    VectorType v = x - mean_;
    llt_.matrixL().solveInPlace(v);
    return v.squaredNorm();
  }

  template <typename Derived>
  Scalar operator()(const Eigen::MatrixBase<Derived> & x) const
  {
    return std::exp(Scalar(-0.5) * squared_mahalanobis(x));
  }

private:
  VectorType mean_;
  MatrixType covariance_;
  Eigen::LLT<MatrixType> llt_;
};

}  // namespace dogm

#endif  // DOGM_GAUSSIAN_HPP_
