#include "pdmp/bps.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "pdmp/errors.hpp"

namespace pdmp {
namespace {

Trajectory simulate_bouncy(const Vector& inv_scales, const Vector& y0, const Vector& v0,
                           double horizon, double rho, Rng& rng, std::uint64_t event_limit) {
  const Eigen::Index d = inv_scales.size();
  if (y0.size() != d || v0.size() != d) {
    throw InvalidArgument("bps: state dimension does not match the target");
  }
  if (!v0.allFinite() || v0.squaredNorm() == 0.0) {
    throw InvalidArgument("bps: velocity must be finite and nonzero");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("bps: horizon must be positive and finite");
  }
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw InvalidArgument("bps: refreshment rate must be finite and >= 0");
  }

  Trajectory traj(Matrix(inv_scales.asDiagonal()), y0, v0);
  Vector y = y0;
  Vector v = v0;
  Vector drift(d), normal(d);
  double t = 0.0;
  std::uint64_t events = 0;
  bool warned = false;

  for (;;) {
    drift = inv_scales.cwiseProduct(v);
    normal = inv_scales.cwiseProduct(y);
    const LinearHazard h{v.dot(normal), drift.squaredNorm()};
    const double bounce = first_arrival_linear(h, rng.exponential());
    const double refresh = rho > 0.0 ? rng.exponential() / rho : kNever;
    const bool is_refresh = refresh < bounce;
    const double tau = is_refresh ? refresh : bounce;
    if (!(t + tau <= horizon)) break;
    if (++events > event_limit) {
      throw EventLimitExceeded("bps: more than " + std::to_string(event_limit) + " events");
    }
    const double next = t + tau;
    y += (next - t) * drift;
    t = next;
    if (is_refresh) {
      for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.normal();
      traj.append(t, EventKind::refresh, -1, y, v);
      continue;
    }
    normal = inv_scales.cwiseProduct(y);
    const double n2 = normal.squaredNorm();
    if (n2 > 0.0) {
      v -= (2.0 * v.dot(normal) / n2) * normal;
    } else {
      if (!warned) {
        std::cerr << "warning: bps reflection at the origin; reversing velocity\n";
        warned = true;
      }
      v = -v;
    }
    traj.append(t, EventKind::reflect, -1, y, v);
  }
  traj.set_horizon(horizon);
  return traj;
}

}  // namespace

Vector bps_reflect(const Vector& y, const Vector& v, const AnisotropicGaussian& target) {
  const Vector n = target.inverse_scales().cwiseProduct(y);
  const double n2 = n.squaredNorm();
  if (!(n2 > 0.0)) throw InvalidArgument("bps_reflect: reflection undefined at y = 0");
  return v - (2.0 * v.dot(n) / n2) * n;
}

LinearHazard bps_hazard(const BpsState& state, const AnisotropicGaussian& target) {
  const Vector drift = target.inverse_scales().cwiseProduct(state.v);
  return {drift.dot(state.y), drift.squaredNorm()};
}

BpsState bps_stationary_init(const AnisotropicGaussian& target, Rng& rng) {
  BpsState s{Vector(target.dim()), Vector(target.dim()), 0.0};
  for (int i = 0; i < target.dim(); ++i) s.y(i) = rng.normal();
  for (int i = 0; i < target.dim(); ++i) s.v(i) = rng.normal();
  return s;
}

Trajectory bps_simulate(const AnisotropicGaussian& target, const BpsState& init, double horizon,
                        double rho, Rng& rng, std::uint64_t event_limit) {
  return simulate_bouncy(target.inverse_scales(), init.y, init.v, horizon, rho, rng, event_limit);
}

FastStats fast_stats(const Vector& y_fast, const Vector& v_fast) {
  FastStats s;
  s.alpha = v_fast.squaredNorm();
  const double dot = v_fast.dot(y_fast);
  s.beta = std::max(0.0, s.alpha * y_fast.squaredNorm() - dot * dot);
  if (s.alpha > 0.0) {
    s.z = dot / std::sqrt(s.alpha);
    s.r = std::sqrt(s.beta / s.alpha);
  }
  return s;
}

FastStats bps_fast_stats(const BpsState& state, const AnisotropicGaussian& target) {
  if (!target.unit_fast_scales()) {
    throw AssumptionViolation("bps_fast_stats: requires Lambda_L = I");
  }
  const int l = target.l();
  return fast_stats(state.y.tail(l), state.v.tail(l));
}

Trajectory fast_subsystem_simulate(const Vector& y_fast, const Vector& v_fast, double horizon,
                                   Rng& rng, std::uint64_t event_limit) {
  return simulate_bouncy(Vector::Ones(y_fast.size()), y_fast, v_fast, horizon, 0.0, rng,
                         event_limit);
}

FastAverages fast_subsystem_averages(const Trajectory& trajectory) {
  FastAverages out;
  const double horizon = trajectory.horizon();
  if (!(horizon > 0.0)) return out;
  const std::size_t n = trajectory.segment_count();
  for (std::size_t k = 0; k < n; ++k) {
    const double t0 = trajectory.time(k);
    const double t1 = k + 1 < n ? trajectory.time(k + 1) : horizon;
    const FastStats s = fast_stats(trajectory.position(k), trajectory.velocity(k));
    if (!(s.alpha > 0.0) || !(t1 > t0)) continue;
    // z moves at constant speed sqrt(alpha) on the segment.
    const double speed = std::sqrt(s.alpha);
    const double z0 = s.z;
    const double z1 = z0 + (t1 - t0) * speed;
    out.mean_z += (z1 * z1 - z0 * z0) / (2.0 * speed);
    out.mean_z2 += (z1 * z1 * z1 - z0 * z0 * z0) / (3.0 * speed);
    // alpha * int z_+^2 / (r^2 + z^2) dt = sqrt(alpha) * int z^2 / (r^2 + z^2) dz over z > 0.
    const double lo = std::max(z0, 0.0);
    const double hi = std::max(z1, 0.0);
    if (hi > lo) {
      double integral = hi - lo;
      if (s.r > 0.0) integral -= s.r * (std::atan(hi / s.r) - std::atan(lo / s.r));
      out.mean_bounce_intensity += speed * integral;
    }
  }
  out.mean_z /= horizon;
  out.mean_z2 /= horizon;
  out.mean_bounce_intensity /= horizon;
  return out;
}

}  // namespace pdmp
