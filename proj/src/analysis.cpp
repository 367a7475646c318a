#include "pdmp/analysis.hpp"

#include <cmath>
#include <numeric>

#include "pdmp/errors.hpp"

namespace pdmp {

GridSeries discretize(const Trajectory& trajectory, double delta, std::span<const int> components,
                      const Matrix* transform) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidArgument("discretize: delta must be positive and finite");
  }
  const int dim = transform ? static_cast<int>(transform->rows()) : trajectory.dim();
  if (transform && transform->cols() != trajectory.dim()) {
    throw InvalidArgument("discretize: transform does not match the trajectory dimension");
  }
  std::vector<int> pick(components.begin(), components.end());
  if (pick.empty()) {
    pick.resize(dim);
    std::iota(pick.begin(), pick.end(), 0);
  }
  for (int c : pick) {
    if (c < 0 || c >= dim) throw InvalidArgument("discretize: component out of range");
  }

  const double horizon = trajectory.horizon();
  const auto count = static_cast<std::size_t>(std::floor(horizon / delta * (1.0 + 1e-12))) + 1;
  GridSeries out;
  out.delta = delta;
  out.width = static_cast<int>(pick.size());
  out.values.reserve(count * pick.size());

  const std::size_t segments = trajectory.segment_count();
  std::size_t k = 0;
  Vector drift = trajectory.flow() * trajectory.velocity(0);
  Vector pos(trajectory.dim()), mapped;
  for (std::size_t n = 0; n < count; ++n) {
    const double t = double(n) * delta;
    std::size_t next = k;
    while (next + 1 < segments && trajectory.time(next + 1) <= t) ++next;
    if (next != k) {
      k = next;
      drift = trajectory.flow() * trajectory.velocity(k);
    }
    pos = trajectory.position(k) + (t - trajectory.time(k)) * drift;
    if (transform) {
      mapped = *transform * pos;
      for (int c : pick) out.values.push_back(mapped(c));
    } else {
      for (int c : pick) out.values.push_back(pos(c));
    }
  }
  return out;
}

GridSeries rescale_time(GridSeries series, double factor) {
  if (!(factor > 0.0)) throw InvalidArgument("rescale_time: factor must be positive");
  series.delta *= factor;
  return series;
}

double diffusion_qv(const GridSeries& series, int component) {
  if (series.size() < 2) throw InvalidArgument("diffusion_qv: need at least two samples");
  if (component < 0 || component >= series.width) {
    throw InvalidArgument("diffusion_qv: component out of range");
  }
  double sum = 0.0;
  for (std::size_t n = 1; n < series.size(); ++n) {
    const double inc = series.at(n)[component] - series.at(n - 1)[component];
    sum += inc * inc;
  }
  return sum / series.horizon();
}

double batch_means_avar(const GridSeries& series, const SeriesFunction& f, int n_batches) {
  if (n_batches < 10) throw InvalidArgument("batch_means_avar: need at least 10 batches");
  const std::size_t per_batch = series.size() / static_cast<std::size_t>(n_batches);
  if (per_batch < 1) throw InvalidArgument("batch_means_avar: series shorter than batch count");

  std::vector<double> means(n_batches, 0.0);
  for (int b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t n = 0; n < per_batch; ++n) s += f(series.at(b * per_batch + n));
    means[b] = s / double(per_batch);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / n_batches;
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  const double batch_time = double(per_batch) * series.delta;
  return batch_time * ss / double(n_batches - 1);
}

RegressionFit loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw InvalidArgument("loglog_slope: need at least 3 points");
  const double n = double(points.size());
  double mx = 0.0, my = 0.0;
  std::vector<double> xs, ys;
  for (const auto& [eps, value] : points) {
    if (!(eps > 0.0) || !(value > 0.0)) {
      throw InvalidArgument("loglog_slope: epsilon and value must be positive");
    }
    xs.push_back(-std::log(eps));
    ys.push_back(std::log(value));
    mx += xs.back();
    my += ys.back();
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("loglog_slope: need at least two distinct epsilon");
  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    rss += r * r;
  }
  fit.slope_stderr = std::sqrt(rss / (n - 2.0) / sxx);
  return fit;
}

MomentDeviation moment_check(const GridSeries& series) {
  const std::size_t n = series.size();
  if (n < 100) throw InvalidArgument("moment_check: need at least 100 samples");
  const int w = series.width;
  Vector mean = Vector::Zero(w);
  for (std::size_t i = 0; i < n; ++i) {
    mean += Eigen::Map<const Vector>(series.at(i).data(), w);
  }
  mean /= double(n);
  Matrix cov = Matrix::Zero(w, w);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector c = Eigen::Map<const Vector>(series.at(i).data(), w) - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= double(n);
  MomentDeviation out;
  out.max_abs_mean = mean.cwiseAbs().maxCoeff();
  out.max_var_dev = (cov.diagonal().array() - 1.0).abs().maxCoeff();
  for (int i = 0; i < w; ++i) {
    for (int j = 0; j < w; ++j) {
      if (i != j) out.max_abs_offdiag = std::max(out.max_abs_offdiag, std::abs(cov(i, j)));
    }
  }
  return out;
}

double geometric_mean(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("geometric_mean: empty input");
  double s = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw InvalidArgument("geometric_mean: values must be positive");
    s += std::log(v);
  }
  return std::exp(s / double(values.size()));
}

}  // namespace pdmp
