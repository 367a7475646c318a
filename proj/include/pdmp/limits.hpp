#pragma once

#include <vector>

#include "pdmp/model.hpp"

namespace pdmp {

/// Diffusion coefficient of the slow coordinate of the planar Zig-Zag in the
/// eps -> 0 limit (unit scales). Throws AlignmentError within 1e-6 of n*pi/4.
double omega_closed_form(double theta);

enum class OmegaBranch { sin_smaller, cos_smaller };

/// One branch of the closed form evaluated without the alignment guard:
/// `sin_smaller` is the |sin| < |cos| expression.
double omega_branch(double theta, OmegaBranch branch);

/// Limit OU process dX = -1/2 Upsilon X dt + Omega^{1/2} dW.
struct OuParams {
  Matrix omega;
  Matrix upsilon;
};

/// Stationary covariance S solving (Upsilon/2) S + S (Upsilon/2)^T = Omega.
/// Throws InvalidArgument when omega is not symmetric positive definite.
Matrix ou_stationary_variance(const OuParams& params);

/// Slow state of the planar BPS fluid limit. kappa = |v(0)|; requires v1^2 < kappa^2.
struct FluidState {
  double y1 = 0.0;
  double v1 = 0.0;
  double kappa = 1.0;
};

/// y1^2 - log(kappa^2 - v1^2), constant along the fluid ODE.
double conserved_H(const FluidState& s);

/// RK4 integration of y1' = v1, v1' = -(kappa^2 - v1^2) y1 on [0, T] with
/// step h. Returns the states at t = 0, h, 2h, ..., floor(T/h) h.
std::vector<FluidState> fluid_integrate(const FluidState& init, double horizon, double step);

/// Speed of the fast block implied by a fluid state, sqrt(kappa^2 - v1^2).
double fluid_fast_speed(const FluidState& s);

/// Limit of the time average of (v_L.y_L)_+^2 / |y_L|^2 in the fast BPS subsystem.
struct CCoefficient {
  /// alpha [1 - r Phi(-r) / phi(r)]: the full-line Gaussian average of alpha x^2 / (r^2 + x^2).
  double full_line = 0.0;
  /// Half of `full_line`: the average restricted to z > 0, i.e. of alpha z_+^2 / (r^2 + z^2).
  double positive_part = 0.0;
};

CCoefficient c_coeff(double alpha, double beta);

/// Expected Zig-Zag flips on [0, T] at stationarity: T / sqrt(2 pi) sum_i sqrt(P_ii).
/// Each coordinate contributes E[(v_i (P x)_i)_+] = sqrt(P_ii) / sqrt(2 pi).
double zz_expected_jumps(const AnisotropicGaussian& target, double horizon);

/// eps -> 0 limit of eps * zz_expected_jumps: T / sqrt(2 pi) sum_i sqrt((Theta_L)_ii).
double zz_jump_limit(const AnisotropicGaussian& target, double horizon);

struct BpsJumpBounds {
  double upper_bound = 0.0;  ///< T/2 (tr (Lambda^eps)^{-1} + 2 rho)
  double limit = 0.0;        ///< eps -> 0 limit of eps * E[N_T]: T / sqrt(pi) Gamma((l+1)/2) / Gamma(l/2)
};

BpsJumpBounds bps_expected_jumps(const AnisotropicGaussian& target, double horizon, double rho);

}  // namespace pdmp
