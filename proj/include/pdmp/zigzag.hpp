#pragma once

#include <cstdint>
#include <vector>

#include "pdmp/event_clock.hpp"
#include "pdmp/model.hpp"
#include "pdmp/rng.hpp"
#include "pdmp/trajectory.hpp"

namespace pdmp {

inline constexpr std::uint64_t kDefaultEventLimit = 1'000'000'000ULL;

/// Zig-Zag state. `y` is in the reparametrised coordinates for Gaussian
/// targets and in the original x coordinates for Student-t targets.
struct ZigZagState {
  Vector y;
  Vector v;  ///< entries exactly +1 or -1
  double t = 0.0;
};

/// Per-coordinate flip hazards along the current segment of a Gaussian target:
/// a_i = v_i (U^T (Lambda^eps)^{-1} y)_i and gamma_i = v_i (Sigma^{-1} v)_i.
std::vector<LinearHazard> zz_rates(const ZigZagState& state, const AnisotropicGaussian& target);

/// Draw y ~ N(0, I) and v uniform on {-1, +1}^d.
ZigZagState zz_stationary_init(const AnisotropicGaussian& target, Rng& rng);

/// Exact event-driven Zig-Zag run on [0, horizon] in y coordinates. All
/// coordinate clocks are redrawn after every flip; ties go to the lowest index.
Trajectory zz_simulate(const AnisotropicGaussian& target, const ZigZagState& init, double horizon,
                       Rng& rng, std::uint64_t event_limit = kDefaultEventLimit);

/// Flip/reflect/refresh tallies of a trajectory.
EventCounts zz_count_events(const Trajectory& trajectory);

/// Flip rates (v_i d_i U(x))_+ for a Student-t target together with the
/// global constant bounds (nu + d) sqrt(P_ii) / (2 sqrt(nu)).
class StudentZigZagRates {
 public:
  explicit StudentZigZagRates(const StudentTarget& target);

  const Vector& bounds() const noexcept { return bounds_; }

  /// Exact rate of coordinate i at position x moving with velocity v.
  double rate(int i, const Vector& x, const Vector& v) const;
  Vector rates(const Vector& x, const Vector& v) const;

 private:
  StudentTarget target_;
  Vector bounds_;
};

StudentZigZagRates zz_rates_student(const StudentTarget& target);

struct StudentRun {
  Trajectory trajectory;  ///< x coordinates, identity flow
  std::uint64_t proposals = 0;
  std::uint64_t accepts = 0;
  double acceptance() const noexcept {
    return proposals == 0 ? 0.0 : double(accepts) / double(proposals);
  }
};

/// Draw x from the Student-t target and v uniform on {-1, +1}^d.
ZigZagState zz_student_stationary_init(const StudentTarget& target, Rng& rng);

/// Zig-Zag on a Student-t target by per-coordinate thinning against the
/// constant bounds. Runs in x coordinates.
StudentRun zz_simulate_student(const StudentTarget& target, const ZigZagState& init,
                               double horizon, Rng& rng,
                               std::uint64_t event_limit = kDefaultEventLimit);

}  // namespace pdmp
