#include "pdmp/zigzag.hpp"

#include <cmath>
#include <string>

#include "pdmp/errors.hpp"

namespace pdmp {
namespace {

void check_state(const ZigZagState& s, int d) {
  if (s.y.size() != d || s.v.size() != d) {
    throw InvalidArgument("zigzag: state dimension does not match the target");
  }
  for (int i = 0; i < d; ++i) {
    if (s.v(i) != 1.0 && s.v(i) != -1.0) {
      throw InvalidArgument("zigzag: velocity entries must be exactly +1 or -1");
    }
  }
}

void check_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("zigzag: horizon must be positive and finite");
  }
}

[[noreturn]] void event_limit_hit(std::uint64_t limit) {
  throw EventLimitExceeded("zigzag: more than " + std::to_string(limit) + " events");
}

}  // namespace

std::vector<LinearHazard> zz_rates(const ZigZagState& state, const AnisotropicGaussian& target) {
  check_state(state, target.dim());
  const Vector offset = target.flow().transpose() * state.y;
  const Vector slope = target.precision() * state.v;
  std::vector<LinearHazard> out(target.dim());
  for (int i = 0; i < target.dim(); ++i) {
    out[i] = {state.v(i) * offset(i), state.v(i) * slope(i)};
  }
  return out;
}

ZigZagState zz_stationary_init(const AnisotropicGaussian& target, Rng& rng) {
  ZigZagState s{Vector(target.dim()), Vector(target.dim()), 0.0};
  for (int i = 0; i < target.dim(); ++i) s.y(i) = rng.normal();
  for (int i = 0; i < target.dim(); ++i) s.v(i) = rng.sign();
  return s;
}

Trajectory zz_simulate(const AnisotropicGaussian& target, const ZigZagState& init, double horizon,
                       Rng& rng, std::uint64_t event_limit) {
  const int d = target.dim();
  check_state(init, d);
  check_horizon(horizon);

  const Matrix& flow = target.flow();
  const Matrix rate_map = flow.transpose();
  const Matrix& precision = target.precision();

  Trajectory traj(flow, init.y, init.v);
  Vector y = init.y;
  Vector v = init.v;
  Vector offset(d), slope(d), drift(d);
  double t = 0.0;
  std::uint64_t events = 0;

  for (;;) {
    offset.noalias() = rate_map * y;
    slope.noalias() = precision * v;
    double best = kNever;
    int which = -1;
    for (int i = 0; i < d; ++i) {
      const double tau =
          first_arrival_linear({v(i) * offset(i), v(i) * slope(i)}, rng.exponential());
      if (tau < best) {
        best = tau;
        which = i;
      }
    }
    if (which < 0 || t + best > horizon) break;
    if (++events > event_limit) event_limit_hit(event_limit);
    drift.noalias() = flow * v;
    const double next = t + best;
    y += (next - t) * drift;
    t = next;
    v(which) = -v(which);
    traj.append(t, EventKind::flip, which, y, v);
  }
  traj.set_horizon(horizon);
  return traj;
}

EventCounts zz_count_events(const Trajectory& trajectory) { return trajectory.counts(); }

StudentZigZagRates::StudentZigZagRates(const StudentTarget& target) : target_(target) {
  const int d = target.dim();
  const double nu = target.nu();
  bounds_ = (nu + d) / (2.0 * std::sqrt(nu)) *
            target.base().precision().diagonal().cwiseSqrt();
}

double StudentZigZagRates::rate(int i, const Vector& x, const Vector& v) const {
  const Matrix& p = target_.base().precision();
  const double q = x.dot(p * x);
  const double g = (target_.nu() + target_.dim()) * p.row(i).dot(x) / (target_.nu() + q);
  return std::max(0.0, v(i) * g);
}

Vector StudentZigZagRates::rates(const Vector& x, const Vector& v) const {
  return v.cwiseProduct(target_.grad_potential(x)).cwiseMax(0.0);
}

StudentZigZagRates zz_rates_student(const StudentTarget& target) {
  return StudentZigZagRates(target);
}

ZigZagState zz_student_stationary_init(const StudentTarget& target, Rng& rng) {
  const int d = target.dim();
  Vector z(d);
  for (int i = 0; i < d; ++i) z(i) = rng.normal();
  const double mix = std::sqrt(target.nu() / rng.chi_squared(target.nu()));
  ZigZagState s{target.base().to_x(mix * z), Vector(d), 0.0};
  for (int i = 0; i < d; ++i) s.v(i) = rng.sign();
  return s;
}

StudentRun zz_simulate_student(const StudentTarget& target, const ZigZagState& init,
                               double horizon, Rng& rng, std::uint64_t event_limit) {
  const int d = target.dim();
  check_state(init, d);
  check_horizon(horizon);

  const StudentZigZagRates rates(target);
  const Matrix& p = target.base().precision();
  const double nu = target.nu();
  const double scale = nu + d;
  const double total_bound = rates.bounds().sum();

  StudentRun run{Trajectory(Matrix::Identity(d, d), init.y, init.v)};
  Vector x = init.y;
  Vector v = init.v;
  Vector px(d), pv(d);
  double t = 0.0;
  std::uint64_t events = 0;

  for (;;) {
    // Along x + s v: (P x)_i + s (P v)_i and x^T P x + 2 s x^T P v + s^2 v^T P v.
    px.noalias() = p * x;
    pv.noalias() = p * v;
    const double q0 = x.dot(px);
    const double q1 = 2.0 * x.dot(pv);
    const double q2 = v.dot(pv);

    // Thin the superposed process with bound sum_i bound_i, then pick the
    // flipping coordinate in proportion to its rate at the accepted time.
    const auto rate_i = [&](int i, double s) {
      const double g = scale * (px(i) + s * pv(i)) / (nu + q0 + s * (q1 + s * q2));
      return std::max(0.0, v(i) * g);
    };
    const auto total_rate = [&](double s) {
      double sum = 0.0;
      for (int i = 0; i < d; ++i) sum += rate_i(i, s);
      return sum;
    };
    const ThinningResult r = thinning_first_arrival(total_bound, total_rate, rng, horizon - t);
    run.proposals += r.proposals;
    run.accepts += r.accepts;
    if (r.time == kNever) break;
    const double best = r.time;
    int which = d - 1;
    double pick = rng.uniform() * total_rate(best);
    for (int i = 0; i < d; ++i) {
      pick -= rate_i(i, best);
      if (pick < 0.0) {
        which = i;
        break;
      }
    }
    if (++events > event_limit) event_limit_hit(event_limit);
    const double next = t + best;
    x += (next - t) * v;
    t = next;
    v(which) = -v(which);
    run.trajectory.append(t, EventKind::flip, which, x, v);
  }
  run.trajectory.set_horizon(horizon);
  return run;
}

}  // namespace pdmp
