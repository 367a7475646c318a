#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pdmp/model.hpp"
#include "pdmp/trajectory.hpp"

namespace pdmp {

/// Vector-valued series sampled at t = 0, delta, 2 delta, ...
struct GridSeries {
  double delta = 0.0;
  int width = 0;               ///< components per sample
  std::vector<double> values;  ///< row-major, size() * width entries

  std::size_t size() const noexcept { return width == 0 ? 0 : values.size() / width; }
  std::span<const double> at(std::size_t n) const {
    return {values.data() + n * width, static_cast<std::size_t>(width)};
  }
  double horizon() const noexcept { return size() < 2 ? 0.0 : delta * double(size() - 1); }
};

/// Sample the exact piecewise-linear path at the grid t = n delta for
/// n = 0..floor(T/delta). `transform` (optional, rows x dim) is applied to the
/// position before `components` are selected; an empty selection keeps all.
GridSeries discretize(const Trajectory& trajectory, double delta,
                      std::span<const int> components = {}, const Matrix* transform = nullptr);

/// Time-rescaled copy: sample spacing multiplied by `factor`.
GridSeries rescale_time(GridSeries series, double factor);

/// Realised quadratic variation of component `component` divided by the
/// series horizon: sum (X_{n+1} - X_n)^2 / T.
double diffusion_qv(const GridSeries& series, int component = 0);

using SeriesFunction = std::function<double(std::span<const double>)>;

/// Batch-means estimate of lim Var(T^{-1/2} int_0^T f). Samples past the last
/// full batch are dropped. Throws InvalidArgument for fewer than 10 batches.
double batch_means_avar(const GridSeries& series, const SeriesFunction& f, int n_batches = 30);

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// OLS of log(avar) on log(1/eps). Needs >= 3 points with at least two
/// distinct eps; every value must be positive.
RegressionFit loglog_slope(std::span<const std::pair<double, double>> points);

struct MomentDeviation {
  double max_abs_mean = 0.0;
  double max_var_dev = 0.0;
  double max_abs_offdiag = 0.0;
};

/// Deviation of the empirical first two moments from N(0, I). Needs >= 100 samples.
MomentDeviation moment_check(const GridSeries& series);

double geometric_mean(std::span<const double> values);

}  // namespace pdmp
