#include "pdmp/limits.hpp"

#include <cmath>
#include <numbers>

#include "pdmp/errors.hpp"
#include "pdmp/event_clock.hpp"

namespace pdmp {
namespace {

double clamped_atanh(double x) {
  x = std::min(x, 1.0 - 1e-15);
  return 0.5 * std::log((1.0 + x) / (1.0 - x));
}

void check_fluid(const FluidState& s) {
  if (!(s.kappa * s.kappa - s.v1 * s.v1 > 0.0) || !std::isfinite(s.y1)) {
    throw InvalidArgument("fluid: requires v1^2 < kappa^2 and finite y1");
  }
}

}  // namespace

double omega_branch(double theta, OmegaBranch branch) {
  const double s = std::abs(std::sin(theta));
  const double c = std::abs(std::cos(theta));
  const double s2 = std::abs(std::sin(2.0 * theta));
  const double denom = 1.0 + s2;
  const double ratio = branch == OmegaBranch::sin_smaller ? s / c : c / s;
  const double small = branch == OmegaBranch::sin_smaller ? s : c;
  return 8.0 / std::sqrt(std::numbers::pi) * clamped_atanh(std::sqrt(ratio)) /
             (denom * std::sqrt(s2)) +
         std::sqrt(2.0 * std::numbers::pi) / (small * denom);
}

double omega_closed_form(double theta) {
  if (!std::isfinite(theta)) throw InvalidArgument("omega_closed_form: theta must be finite");
  const double quarter = std::numbers::pi / 4.0;
  const double offset = theta - quarter * std::round(theta / quarter);
  if (std::abs(offset) <= 1e-6) {
    throw AlignmentError("omega_closed_form: theta is within 1e-6 of a multiple of pi/4");
  }
  const bool sin_smaller = std::abs(std::sin(theta)) < std::abs(std::cos(theta));
  return omega_branch(theta, sin_smaller ? OmegaBranch::sin_smaller : OmegaBranch::cos_smaller);
}

Matrix ou_stationary_variance(const OuParams& p) {
  const Eigen::Index k = p.omega.rows();
  if (p.omega.cols() != k || p.upsilon.rows() != k || p.upsilon.cols() != k || k == 0) {
    throw InvalidArgument("ou_stationary_variance: omega and upsilon must be square of equal size");
  }
  if ((p.omega - p.omega.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + p.omega.norm())) {
    throw InvalidArgument("ou_stationary_variance: omega is not symmetric");
  }
  if (Eigen::LLT<Matrix>(p.omega).info() != Eigen::Success) {
    throw InvalidArgument("ou_stationary_variance: omega is not positive definite");
  }
  const Matrix drift = 0.5 * p.upsilon;
  const Matrix eye = Matrix::Identity(k, k);
  // vec(A S + S A^T) = (I (x) A + A (x) I) vec(S) for column-major vec.
  Matrix system = Matrix::Zero(k * k, k * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      system.block(i * k, j * k, k, k) += eye(i, j) * drift;
      system.block(i * k, j * k, k, k) += drift(i, j) * eye;
    }
  }
  const Vector rhs = Eigen::Map<const Vector>(p.omega.data(), k * k);
  const Vector sol = system.fullPivLu().solve(rhs);
  Matrix s = Eigen::Map<const Matrix>(sol.data(), k, k);
  return 0.5 * (s + s.transpose());
}

double conserved_H(const FluidState& s) {
  check_fluid(s);
  return s.y1 * s.y1 - std::log(s.kappa * s.kappa - s.v1 * s.v1);
}

double fluid_fast_speed(const FluidState& s) {
  check_fluid(s);
  return std::sqrt(s.kappa * s.kappa - s.v1 * s.v1);
}

std::vector<FluidState> fluid_integrate(const FluidState& init, double horizon, double step) {
  check_fluid(init);
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidArgument("fluid_integrate: step must be positive and finite");
  }
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("fluid_integrate: horizon must be finite and >= 0");
  }
  const double k2 = init.kappa * init.kappa;
  const auto rhs = [k2](double y, double v) { return std::pair{v, -(k2 - v * v) * y}; };

  const auto steps = static_cast<std::size_t>(std::floor(horizon / step * (1.0 + 1e-12)));
  std::vector<FluidState> path;
  path.reserve(steps + 1);
  path.push_back(init);
  double y = init.y1, v = init.v1;
  for (std::size_t n = 0; n < steps; ++n) {
    const auto [ky1, kv1] = rhs(y, v);
    const auto [ky2, kv2] = rhs(y + 0.5 * step * ky1, v + 0.5 * step * kv1);
    const auto [ky3, kv3] = rhs(y + 0.5 * step * ky2, v + 0.5 * step * kv2);
    const auto [ky4, kv4] = rhs(y + step * ky3, v + step * kv3);
    y += step / 6.0 * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4);
    v += step / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
    const FluidState s{y, v, init.kappa};
    check_fluid(s);
    path.push_back(s);
  }
  return path;
}

CCoefficient c_coeff(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta >= 0.0)) {
    throw InvalidArgument("c_coeff: requires alpha > 0 and beta >= 0");
  }
  const double r = std::sqrt(beta / alpha);
  CCoefficient c;
  c.full_line = alpha * (1.0 - r * mills_ratio(r));
  c.positive_part = 0.5 * c.full_line;
  return c;
}

double zz_expected_jumps(const AnisotropicGaussian& target, double horizon) {
  return horizon / std::sqrt(2.0 * std::numbers::pi) *
         target.precision().diagonal().cwiseSqrt().sum();
}

double zz_jump_limit(const AnisotropicGaussian& target, double horizon) {
  return horizon / std::sqrt(2.0 * std::numbers::pi) *
         target.theta_l().diagonal().cwiseMax(0.0).cwiseSqrt().sum();
}

BpsJumpBounds bps_expected_jumps(const AnisotropicGaussian& target, double horizon, double rho) {
  const double l = target.l();
  BpsJumpBounds b;
  b.upper_bound = 0.5 * horizon * (target.inverse_scales().sum() + 2.0 * rho);
  b.limit = horizon / std::sqrt(std::numbers::pi) *
            std::exp(std::lgamma(0.5 * (l + 1.0)) - std::lgamma(0.5 * l));
  return b;
}

}  // namespace pdmp
