#include "pdmp/event_clock.hpp"

#include <algorithm>
#include <numbers>

namespace pdmp {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double mills_ratio(double x) {
  if (x < 5.0) return normal_cdf(-x) / normal_pdf(x);
  // Continued fraction 1/(x + 1/(x + 2/(x + 3/(x + ...)))), evaluated backwards.
  double tail = x;
  for (int n = 60; n >= 1; --n) tail = x + n / tail;
  return 1.0 / tail;
}

double integrated_hazard(LinearHazard h, double t) {
  if (t <= 0.0) return 0.0;
  const auto [a, g] = h;
  if (g == 0.0) return a > 0.0 ? a * t : 0.0;
  if (g > 0.0) {
    if (a >= 0.0) return a * t + 0.5 * g * t * t;
    const double dead = -a / g;
    if (t <= dead) return 0.0;
    const double s = t - dead;
    return 0.5 * g * s * s;
  }
  if (a <= 0.0) return 0.0;
  const double live = std::min(t, a / -g);
  return a * live + 0.5 * g * live * live;
}

double first_arrival_linear(LinearHazard h, double e) {
  if (!(e > 0.0) || !std::isfinite(e)) {
    throw InvalidArgument("first_arrival_linear: level must be positive and finite");
  }
  const auto [a, g] = h;
  if (g == 0.0) return a > 0.0 ? e / a : kNever;
  if (g > 0.0 && a < 0.0) return -a / g + std::sqrt(2.0 * e / g);
  if (g < 0.0) {
    if (a <= 0.0) return kNever;
    if (e >= a * a / (2.0 * -g)) return kNever;
  }
  // Smaller root of a t + g t^2 / 2 = e, written without cancellation.
  return 2.0 * e / (a + std::sqrt(a * a + 2.0 * g * e));
}

double survival_linear(LinearHazard h, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("survival_linear: t must be >= 0");
  return std::exp(-integrated_hazard(h, t));
}

double mean_first_arrival(LinearHazard h) {
  if (!(h.gamma > 0.0)) throw InvalidArgument("mean_first_arrival: requires gamma > 0");
  const double root = std::sqrt(h.gamma);
  if (h.a >= 0.0) return mills_ratio(h.a / root) / root;
  return -h.a / h.gamma + std::sqrt(std::numbers::pi / (2.0 * h.gamma));
}

}  // namespace pdmp
