#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "pdmp/analysis.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/limits.hpp"
#include "pdmp/rng.hpp"
#include "pdmp/zigzag.hpp"
#include "support.hpp"

using namespace pdmp;

namespace {

GridSeries scalar_series(const std::vector<double>& xs, double delta) {
  GridSeries s;
  s.delta = delta;
  s.width = 1;
  s.values = xs;
  return s;
}

Trajectory one_d(double x0, double v0) {
  return Trajectory(Matrix::Identity(1, 1), Vector::Constant(1, x0), Vector::Constant(1, v0));
}

}  // namespace

TEST_CASE("discretize a free flight") {
  Trajectory traj = one_d(0.5, 1.0);
  traj.set_horizon(2.0);
  const GridSeries s = discretize(traj, 0.25);
  REQUIRE(s.size() == 9);
  for (std::size_t n = 0; n < s.size(); ++n) CHECK(s.at(n)[0] == doctest::Approx(0.5 + 0.25 * double(n)));
  CHECK_THROWS_AS(discretize(traj, 0.0), InvalidArgument);
}

TEST_CASE("discretize is right-continuous and reconstructs event positions") {
  Trajectory traj = one_d(0.0, 1.0);
  traj.append(0.5, EventKind::flip, 0, Vector::Constant(1, 0.5), Vector::Constant(1, -1.0));
  traj.append(1.25, EventKind::flip, 0, Vector::Constant(1, -0.25), Vector::Constant(1, 1.0));
  traj.set_horizon(2.0);
  CHECK(traj.velocity_at(0.5)(0) == -1.0);
  const GridSeries s = discretize(traj, 0.25);
  const double expect[] = {0.0, 0.25, 0.5, 0.25, 0.0, -0.25, 0.0, 0.25, 0.5};
  REQUIRE(s.size() == 9);
  for (std::size_t n = 0; n < s.size(); ++n) CHECK(std::abs(s.at(n)[0] - expect[n]) < 1e-12);
  // re-integrating the increments recovers the event positions
  double acc = s.at(0)[0];
  for (std::size_t n = 1; n <= 5; ++n) acc += s.at(n)[0] - s.at(n - 1)[0];
  CHECK(std::abs(acc - (-0.25)) < 1e-12);
}

TEST_CASE("discretize with transform and components") {
  Trajectory traj(Matrix::Identity(2, 2), Vector{{1.0, 2.0}}, Vector{{0.0, 0.0}});
  traj.set_horizon(1.0);
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  const int second[] = {1};
  const GridSeries s = discretize(traj, 0.5, second, &m);
  CHECK(s.width == 1);
  CHECK(s.at(0)[0] == 1.0);
  const int bad[] = {2};
  CHECK_THROWS_AS(discretize(traj, 0.5, bad), InvalidArgument);
}

TEST_CASE("diffusion_qv examples and invariances") {
  std::vector<double> line;
  for (int n = 0; n <= 100; ++n) line.push_back(0.01 * n);
  CHECK(diffusion_qv(scalar_series(line, 0.01)) == doctest::Approx(0.01));
  CHECK_THROWS_AS(diffusion_qv(scalar_series({1.0}, 0.1)), InvalidArgument);

  // Euler OU with Omega = 2: dX = -X dt + sqrt(2) dW
  Rng rng(1);
  const double dt = 1e-3;
  std::vector<double> ou{0.0};
  for (int n = 0; n < 1000000; ++n) {
    ou.push_back(ou.back() - ou.back() * dt + std::sqrt(2.0 * dt) * rng.normal());
  }
  const GridSeries s = scalar_series(ou, dt);
  const double q = diffusion_qv(s);
  CHECK(q == doctest::Approx(2.0).epsilon(0.05));

  std::vector<double> shifted = ou, scaled = ou;
  for (double& x : shifted) x += 3.0;
  for (double& x : scaled) x *= 1.5;
  CHECK(diffusion_qv(scalar_series(shifted, dt)) == doctest::Approx(q).epsilon(1e-9));
  CHECK(diffusion_qv(scalar_series(scaled, dt)) == doctest::Approx(2.25 * q).epsilon(1e-12));
}

TEST_CASE("batch means") {
  Rng rng(2);
  std::vector<double> iid(100000);
  for (double& x : iid) x = rng.normal();
  const GridSeries s = scalar_series(iid, 1.0);
  const SeriesFunction id = [](std::span<const double> v) { return v[0]; };
  const SeriesFunction shifted = [](std::span<const double> v) { return v[0] + 7.0; };
  CHECK(batch_means_avar(s, id) == doctest::Approx(1.0).epsilon(0.3));
  CHECK(batch_means_avar(s, shifted) == doctest::Approx(batch_means_avar(s, id)).epsilon(1e-8));
  CHECK(batch_means_avar(scalar_series(std::vector<double>(1000, 2.0), 1.0), id) == 0.0);
  CHECK_THROWS_AS(batch_means_avar(s, id, 9), InvalidArgument);

  // averaged over many independent series the estimator is unbiased within 10%
  double mean = 0.0;
  for (int r = 0; r < 20; ++r) {
    for (double& x : iid) x = rng.normal();
    mean += batch_means_avar(scalar_series(iid, 1.0), id) / 20.0;
  }
  CHECK(mean == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("loglog_slope") {
  std::vector<std::pair<double, double>> pw, flat;
  for (double eps : {0.1, 0.03, 0.01, 0.003}) {
    pw.emplace_back(eps, 1.0 / eps);
    flat.emplace_back(eps, 4.2);
  }
  const RegressionFit a = loglog_slope(pw);
  CHECK(a.slope == doctest::Approx(1.0));
  CHECK(a.slope_stderr < 1e-12);
  CHECK(loglog_slope(flat).slope == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope(std::vector<std::pair<double, double>>{{0.1, 1.0}, {0.2, 2.0}}), InvalidArgument);
  CHECK_THROWS_AS(
      loglog_slope(std::vector<std::pair<double, double>>{{0.1, 1.0}, {0.2, -2.0}, {0.3, 1.0}}),
      InvalidArgument);
}

TEST_CASE("moment_check") {
  Rng rng(3);
  GridSeries s;
  s.delta = 1.0;
  s.width = 2;
  for (int i = 0; i < 2000000; ++i) s.values.push_back(rng.normal());
  const MomentDeviation m = moment_check(s);
  CHECK(m.max_abs_mean < 0.01);
  CHECK(m.max_var_dev < 0.01);
  CHECK(m.max_abs_offdiag < 0.01);

  const MomentDeviation c = moment_check(scalar_series(std::vector<double>(500, 0.0), 1.0));
  CHECK(c.max_abs_mean == 0.0);
  CHECK(c.max_var_dev == 1.0);
  CHECK_THROWS_AS(moment_check(scalar_series(std::vector<double>(99, 0.0), 1.0)), InvalidArgument);
}

TEST_CASE("geometric mean") {
  CHECK(geometric_mean(std::vector<double>{1.0, 4.0}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(geometric_mean(std::vector<double>{1.0, 0.0}), InvalidArgument);
}

TEST_CASE("zz avar grows like 1/eps at theta = pi/6") {
  const SeriesFunction f = [](std::span<const double> v) { return v[0] * v[0]; };
  std::vector<std::pair<double, double>> pts;
  for (double eps : {0.1, 0.03, 0.01}) {
    const AnisotropicGaussian t = AnisotropicGaussian::planar(std::numbers::pi / 6, eps);
    for (int r = 0; r < 8; ++r) {
      Rng rng = Rng::for_replica(55, r);
      const double horizon = 10.0 / eps;
      const Trajectory traj = zz_simulate(t, zz_stationary_init(t, rng), horizon, rng);
      const int first[] = {0};
      pts.emplace_back(eps, batch_means_avar(discretize(traj, horizon / 3000, first), f));
    }
  }
  CHECK(loglog_slope(pts).slope == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("qv estimate of omega at small eps") {
  const double th = std::numbers::pi / 6, eps = 1e-3;
  const AnisotropicGaussian t = AnisotropicGaussian::planar(th, eps);
  std::vector<double> est;
  for (int r = 0; r < 20; ++r) {
    Rng rng = Rng::for_replica(7, r);
    const Trajectory traj = zz_simulate(t, zz_stationary_init(t, rng), 2.0 / eps, rng);
    const int first[] = {0};
    est.push_back(diffusion_qv(rescale_time(discretize(traj, 1e-3 / eps, first), eps)));
  }
  CHECK(geometric_mean(est) == doctest::Approx(omega_closed_form(th)).epsilon(0.15));
}
