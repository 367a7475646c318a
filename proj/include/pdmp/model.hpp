#pragma once

#include <Eigen/Dense>

namespace pdmp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// 2x2 rotation ((cos t, -sin t), (sin t, cos t)).
Matrix make_rotation_2d(double theta);

/// Centered Gaussian N(0, Sigma) with Sigma = U^T (Lambda^eps)^2 U and
/// Lambda^eps = diag(Lambda_K, eps * Lambda_L).
///
/// Coordinates 0..k-1 of the eigenbasis form the slow block K and k..d-1 the
/// fast block L. The reparametrised coordinate y = (Lambda^eps)^{-1} U x is
/// standard normal under the target. Immutable after construction.
class AnisotropicGaussian {
 public:
  AnisotropicGaussian(Matrix rotation, Vector lambda_k, Vector lambda_l, double epsilon);

  /// Two-dimensional target with rotation angle `theta` and k = l = 1.
  static AnisotropicGaussian planar(double theta, double epsilon, double lambda_k = 1.0,
                                    double lambda_l = 1.0);

  int dim() const noexcept { return static_cast<int>(scales_.size()); }
  int k() const noexcept { return static_cast<int>(lambda_k_.size()); }
  int l() const noexcept { return static_cast<int>(lambda_l_.size()); }
  double epsilon() const noexcept { return epsilon_; }

  const Matrix& rotation() const noexcept { return rotation_; }
  const Vector& lambda_k() const noexcept { return lambda_k_; }
  const Vector& lambda_l() const noexcept { return lambda_l_; }

  /// Diagonal of Lambda^eps.
  const Vector& scales() const noexcept { return scales_; }
  /// Diagonal of (Lambda^eps)^{-1}.
  const Vector& inverse_scales() const noexcept { return inverse_scales_; }

  const Matrix& covariance() const noexcept { return covariance_; }
  /// U^T (Lambda^eps)^{-2} U.
  const Matrix& precision() const noexcept { return precision_; }

  /// dy/dt per unit x-velocity: (Lambda^eps)^{-1} U.
  const Matrix& flow() const noexcept { return flow_; }

  Vector to_y(const Vector& x) const;
  Vector to_x(const Vector& y) const;

  /// U_{L,.}^T Lambda_L^{-2} U_{L,.}: the eps -> 0 limit of eps^2 * precision.
  Matrix theta_l() const;

  /// True when Lambda_L is the identity (needed by the BPS fast-subsystem statistics).
  bool unit_fast_scales(double tol = 0.0) const;

 private:
  Matrix rotation_;
  Vector lambda_k_;
  Vector lambda_l_;
  double epsilon_;
  Vector scales_;
  Vector inverse_scales_;
  Matrix covariance_;
  Matrix precision_;
  Matrix flow_;
};

/// Multivariate Student-t with scale matrix Sigma^eps taken from `base` and
/// `nu` degrees of freedom. The covariance is nu / (nu - 2) * Sigma^eps.
class StudentTarget {
 public:
  StudentTarget(AnisotropicGaussian base, double nu);

  const AnisotropicGaussian& base() const noexcept { return base_; }
  double nu() const noexcept { return nu_; }
  int dim() const noexcept { return base_.dim(); }

  const Matrix& scale() const noexcept { return base_.covariance(); }
  Matrix covariance() const { return nu_ / (nu_ - 2.0) * base_.covariance(); }

  /// Gradient of the negative log-density, (nu + d) P x / (nu + x^T P x).
  Vector grad_potential(const Vector& x) const;

 private:
  AnisotropicGaussian base_;
  double nu_;
};

/// Assumption check: v^T Theta_L v > tol for every v in {-1,0,1}^d \ {0}.
/// Throws DimensionTooLarge for d > 16.
bool check_flippability(const AnisotropicGaussian& target, double tol = 1e-12);

}  // namespace pdmp
