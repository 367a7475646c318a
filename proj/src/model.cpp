#include "pdmp/model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pdmp/errors.hpp"

namespace pdmp {

Matrix make_rotation_2d(double theta) {
  if (!std::isfinite(theta)) throw InvalidArgument("make_rotation_2d: theta must be finite");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Matrix u(2, 2);
  u << c, -s, s, c;
  return u;
}

AnisotropicGaussian::AnisotropicGaussian(Matrix rotation, Vector lambda_k, Vector lambda_l,
                                         double epsilon)
    : rotation_(std::move(rotation)),
      lambda_k_(std::move(lambda_k)),
      lambda_l_(std::move(lambda_l)),
      epsilon_(epsilon) {
  const Eigen::Index k = lambda_k_.size();
  const Eigen::Index l = lambda_l_.size();
  if (k < 1 || l < 1) throw InvalidArgument("AnisotropicGaussian: need k >= 1 and l >= 1");
  const Eigen::Index d = k + l;
  if (rotation_.rows() != d || rotation_.cols() != d) {
    throw InvalidArgument("AnisotropicGaussian: rotation must be " + std::to_string(d) + "x" +
                          std::to_string(d));
  }
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
    throw InvalidArgument("AnisotropicGaussian: epsilon must be positive and finite");
  }
  if (!(lambda_k_.array() > 0.0).all() || !(lambda_l_.array() > 0.0).all() ||
      !lambda_k_.allFinite() || !lambda_l_.allFinite()) {
    throw InvalidArgument("AnisotropicGaussian: scales must be positive and finite");
  }
  const double orth_err =
      (rotation_.transpose() * rotation_ - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (!(orth_err <= 1e-10)) {
    throw InvalidArgument("AnisotropicGaussian: rotation is not orthogonal (max |U^T U - I| = " +
                          std::to_string(orth_err) + ")");
  }

  scales_.resize(d);
  scales_.head(k) = lambda_k_;
  scales_.tail(l) = epsilon_ * lambda_l_;
  inverse_scales_ = scales_.cwiseInverse();

  flow_ = inverse_scales_.asDiagonal() * rotation_;
  precision_ = flow_.transpose() * flow_;
  const Matrix scaled = scales_.asDiagonal() * rotation_;
  covariance_ = scaled.transpose() * scaled;
}

AnisotropicGaussian AnisotropicGaussian::planar(double theta, double epsilon, double lambda_k,
                                                double lambda_l) {
  return AnisotropicGaussian(make_rotation_2d(theta), Vector::Constant(1, lambda_k),
                             Vector::Constant(1, lambda_l), epsilon);
}

Vector AnisotropicGaussian::to_y(const Vector& x) const { return flow_ * x; }

Vector AnisotropicGaussian::to_x(const Vector& y) const {
  return rotation_.transpose() * scales_.cwiseProduct(y);
}

Matrix AnisotropicGaussian::theta_l() const {
  const Matrix block = lambda_l_.cwiseInverse().asDiagonal() * rotation_.bottomRows(l());
  return block.transpose() * block;
}

bool AnisotropicGaussian::unit_fast_scales(double tol) const {
  return ((lambda_l_.array() - 1.0).abs() <= tol).all();
}

StudentTarget::StudentTarget(AnisotropicGaussian base, double nu) : base_(std::move(base)), nu_(nu) {
  if (!(nu_ > 2.0) || !std::isfinite(nu_)) {
    throw InvalidArgument("StudentTarget: nu must be finite and > 2");
  }
}

Vector StudentTarget::grad_potential(const Vector& x) const {
  const Vector px = base_.precision() * x;
  const double q = x.dot(px);
  return (nu_ + dim()) / (nu_ + q) * px;
}

bool check_flippability(const AnisotropicGaussian& target, double tol) {
  const int d = target.dim();
  if (d > 16) {
    throw DimensionTooLarge("check_flippability: d = " + std::to_string(d) +
                            " exceeds the enumeration limit 16");
  }
  const Matrix theta = target.theta_l();

  // Odometer over {-1,0,1}^d starting at (-1,...,-1); q = v^T Theta v and
  // w = Theta v are updated one digit change at a time.
  std::vector<int> v(d, -1);
  Vector w = -theta.rowwise().sum();
  double q = theta.sum();
  const double recheck_band = 1e-6 * (1.0 + theta.cwiseAbs().maxCoeff());
  for (;;) {
    bool nonzero = false;
    for (int x : v) nonzero = nonzero || x != 0;
    if (nonzero && !(q > tol + recheck_band)) {
      // Incremental updates drift; settle borderline values exactly.
      Vector vv(d);
      for (int i = 0; i < d; ++i) vv(i) = v[i];
      if (!(vv.dot(theta * vv) > tol)) return false;
    }

    int j = 0;
    for (; j < d; ++j) {
      const int delta = v[j] == 1 ? -2 : 1;
      q += 2.0 * delta * w(j) + double(delta) * delta * theta(j, j);
      w += delta * theta.col(j);
      v[j] += delta;
      if (v[j] != -1) break;
    }
    if (j == d) break;
  }
  return true;
}

}  // namespace pdmp
