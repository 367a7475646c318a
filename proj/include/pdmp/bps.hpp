#pragma once

#include <cstdint>

#include "pdmp/event_clock.hpp"
#include "pdmp/model.hpp"
#include "pdmp/rng.hpp"
#include "pdmp/trajectory.hpp"
#include "pdmp/zigzag.hpp"

namespace pdmp {

/// Bouncy Particle Sampler state in reparametrised coordinates. The velocity
/// lives in the eigenbasis of the target (v = U v_x), where the dynamics read
/// dy/dt = (Lambda^eps)^{-1} v.
struct BpsState {
  Vector y;
  Vector v;
  double t = 0.0;
};

/// v - 2 (v.n / |n|^2) n with n = (Lambda^eps)^{-1} y. Throws InvalidArgument when n = 0.
Vector bps_reflect(const Vector& y, const Vector& v, const AnisotropicGaussian& target);

/// a = v^T (Lambda^eps)^{-1} y, gamma = v^T (Lambda^eps)^{-2} v.
LinearHazard bps_hazard(const BpsState& state, const AnisotropicGaussian& target);

/// Draw y ~ N(0, I) and v ~ N(0, I).
BpsState bps_stationary_init(const AnisotropicGaussian& target, Rng& rng);

/// Exact reflection times by inversion competing with Exp(rho) refreshments.
/// A reflection at (Lambda^eps)^{-1} y = 0 (only reachable from a user-supplied
/// initial state) reverses the velocity and logs a warning.
Trajectory bps_simulate(const AnisotropicGaussian& target, const BpsState& init, double horizon,
                        double rho, Rng& rng, std::uint64_t event_limit = kDefaultEventLimit);

/// Invariants of the fast block between refreshments.
struct FastStats {
  double alpha = 0.0;  ///< |v_L|^2
  double beta = 0.0;   ///< |v_L|^2 |y_L|^2 - (v_L . y_L)^2
  double z = 0.0;      ///< v_L . y_L / |v_L|
  double r = 0.0;      ///< sqrt(beta / alpha)
};

FastStats fast_stats(const Vector& y_fast, const Vector& v_fast);

/// Fast-block statistics of a BPS state. Requires Lambda_L = I
/// (AssumptionViolation otherwise).
FastStats bps_fast_stats(const BpsState& state, const AnisotropicGaussian& target);

/// Unit-scale BPS on R^l without refreshment: dy/dt = v, rate (v.y)_+.
/// This is the eps -> 0 fast subsystem of the BPS when Lambda_L = I.
Trajectory fast_subsystem_simulate(const Vector& y_fast, const Vector& v_fast, double horizon,
                                   Rng& rng, std::uint64_t event_limit = kDefaultEventLimit);

/// Exact time averages along a fast-subsystem trajectory.
struct FastAverages {
  double mean_z = 0.0;
  double mean_z2 = 0.0;
  /// Average of (v.y)_+^2 / |y|^2 = alpha z_+^2 / (r^2 + z^2).
  double mean_bounce_intensity = 0.0;
};

FastAverages fast_subsystem_averages(const Trajectory& trajectory);

}  // namespace pdmp
