#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "pdmp/errors.hpp"
#include "pdmp/rng.hpp"

namespace pdmp {

/// Sentinel for "no event ever happens".
inline constexpr double kNever = std::numeric_limits<double>::infinity();

/// Event rate (a + gamma * t)_+ along the current deterministic segment.
struct LinearHazard {
  double a = 0.0;
  double gamma = 0.0;
};

/// Integral of (a + gamma s)_+ over [0, t].
double integrated_hazard(LinearHazard h, double t);

/// First arrival time of the hazard by inverting the integrated hazard at
/// level `e` (a unit exponential draw). Returns kNever when the total mass of
/// the hazard is below `e`. Throws InvalidArgument unless e > 0 and finite.
double first_arrival_linear(LinearHazard h, double e);

/// P(X >= t) = exp(-integrated_hazard(h, t)). Throws for negative t.
double survival_linear(LinearHazard h, double t);

/// E[X] for gamma > 0 (the mean is infinite or undefined otherwise).
///   a >= 0: R(a / sqrt(gamma)) / sqrt(gamma)
///   a <  0: -a / gamma + sqrt(pi / (2 gamma))
/// where R is the Mills ratio Phi(-x) / phi(x).
double mean_first_arrival(LinearHazard h);

/// Mills ratio Phi(-x) / phi(x), accurate for large x.
double mills_ratio(double x);

/// Standard normal cdf and density.
double normal_cdf(double x);
double normal_pdf(double x);

struct ThinningResult {
  double time = kNever;
  std::uint64_t proposals = 0;
  std::uint64_t accepts = 0;
};

/// First arrival of a point process with intensity `rate(t)` by thinning a
/// homogeneous process of intensity `bound`. Proposals beyond `horizon`
/// end the search with time = kNever.
template <class RateFn>
ThinningResult thinning_first_arrival(double bound, RateFn&& rate, Rng& rng, double horizon) {
  if (!(bound > 0.0) || !std::isfinite(bound)) {
    throw InvalidArgument("thinning_first_arrival: bound must be positive and finite");
  }
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("thinning_first_arrival: horizon must be finite and >= 0");
  }
  ThinningResult out;
  double t = 0.0;
  for (;;) {
    t += rng.exponential() / bound;
    if (t > horizon) return out;
    ++out.proposals;
    const double lambda = rate(t);
    if (lambda > bound * (1.0 + 1e-9)) {
      throw BoundViolation("thinning_first_arrival: rate " + std::to_string(lambda) +
                           " exceeds bound " + std::to_string(bound) + " at t = " +
                           std::to_string(t));
    }
    if (rng.uniform() * bound < lambda) {
      ++out.accepts;
      out.time = t;
      return out;
    }
  }
}

}  // namespace pdmp
