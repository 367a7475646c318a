#include "pdmp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "pdmp/bps.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/limits.hpp"
#include "pdmp/parallel.hpp"
#include "pdmp/zigzag.hpp"

namespace pdmp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Stream of replica r at grid point g: replica_seed(replica_seed(master, g), r).
Rng replica_rng(const ExperimentConfig& cfg, std::size_t grid_index, std::size_t replica) {
  return Rng(replica_seed(replica_seed(cfg.master_seed, grid_index), replica));
}

struct ReplicaRun {
  Trajectory trajectory;
  std::uint64_t proposals = 0;
  std::uint64_t accepts = 0;
};

AnisotropicGaussian target_at(const ExperimentConfig& cfg, const GridPoint& p) {
  return cfg.target.build(p.theta, p.epsilon);
}

/// Stationary start, then one trajectory on [0, horizon].
ReplicaRun simulate_replica(const ExperimentConfig& cfg, const AnisotropicGaussian& target,
                            double horizon, Rng& rng) {
  if (cfg.distribution == Distribution::student) {
    const StudentTarget student(target, *cfg.target.student_nu);
    const ZigZagState init = zz_student_stationary_init(student, rng);
    StudentRun run = zz_simulate_student(student, init, horizon, rng);
    return {std::move(run.trajectory), run.proposals, run.accepts};
  }
  if (cfg.sampler == SamplerKind::zigzag) {
    const ZigZagState init = zz_stationary_init(target, rng);
    return {zz_simulate(target, init, horizon, rng)};
  }
  const BpsState init = bps_stationary_init(target, rng);
  return {bps_simulate(target, init, horizon, cfg.rho, rng)};
}

/// Linear map from trajectory coordinates to standardised y coordinates.
Matrix standardising_map(const ExperimentConfig& cfg, const AnisotropicGaussian& target) {
  if (cfg.distribution == Distribution::student) {
    const double nu = *cfg.target.student_nu;
    return std::sqrt((nu - 2.0) / nu) * target.flow();
  }
  return Matrix::Identity(target.dim(), target.dim());
}

/// Map from trajectory coordinates to y coordinates (identity unless Student).
Matrix y_map(const ExperimentConfig& cfg, const AnisotropicGaussian& target) {
  if (cfg.distribution == Distribution::student) return target.flow();
  return Matrix::Identity(target.dim(), target.dim());
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / double(v.size() - 1) / double(v.size()));
}

std::vector<double> logs(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) out.push_back(std::log(x));
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write " + path.string());
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json moments_json(const MomentDeviation& m) {
  return {{"max_abs_mean", m.max_abs_mean},
          {"max_var_dev", m.max_var_dev},
          {"max_abs_offdiag", m.max_abs_offdiag}};
}

SeriesFunction series_function(const std::string& name) {
  if (name == "y1") return [](std::span<const double> s) { return s[0]; };
  return [](std::span<const double> s) { return s[0] * s[0]; };
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

}  // namespace

std::vector<JumpCountRow> run_jump_counts(const ExperimentConfig& cfg) {
  require(cfg.distribution == Distribution::gaussian, "distribution", "jump-count needs a gaussian target");
  std::vector<JumpCountRow> rows;
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const GridPoint p = cfg.grid[g];
    const AnisotropicGaussian target = target_at(cfg, p);
    JumpCountRow row;
    row.point = p;
    row.counts = parallel_map(cfg.replicas, [&](std::size_t r) {
      Rng rng = replica_rng(cfg, g, r);
      return double(simulate_replica(cfg, target, cfg.horizon, rng).trajectory.counts().total());
    });
    row.mean_count = mean_of(row.counts);
    row.stderr_count = stderr_of(row.counts);
    if (cfg.sampler == SamplerKind::zigzag) {
      row.formula = zz_expected_jumps(target, cfg.horizon);
      row.limit = zz_jump_limit(target, cfg.horizon) / p.epsilon;
    } else {
      const BpsJumpBounds b = bps_expected_jumps(target, cfg.horizon, cfg.rho);
      row.formula = b.upper_bound;
      row.limit = b.limit / p.epsilon;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<OmegaScanRow> run_omega_scan(const ExperimentConfig& cfg) {
  require(cfg.sampler == SamplerKind::zigzag, "sampler", "omega-scan needs the zigzag sampler");
  require(cfg.distribution == Distribution::gaussian, "distribution", "omega-scan needs a gaussian target");
  require(!cfg.target.rotation && cfg.target.dim == 2, "target", "omega-scan needs a planar theta target");
  // horizon and delta are in the diffusive time scale t / eps.
  const double delta = cfg.analysis.delta > 0.0 ? cfg.analysis.delta : std::min(1e-3 * cfg.horizon / 2.0, 1e-3);
  std::vector<OmegaScanRow> rows;
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const GridPoint p = cfg.grid[g];
    const AnisotropicGaussian target = target_at(cfg, p);
    OmegaScanRow row;
    row.theta = p.theta;
    row.replicas = parallel_map(cfg.replicas, [&](std::size_t r) {
      Rng rng = replica_rng(cfg, g, r);
      const ReplicaRun run = simulate_replica(cfg, target, cfg.horizon / p.epsilon, rng);
      const int first[] = {0};
      const GridSeries s = rescale_time(discretize(run.trajectory, delta / p.epsilon, first), p.epsilon);
      return diffusion_qv(s);
    });
    row.estimate = geometric_mean(row.replicas);
    row.log_stderr = stderr_of(logs(row.replicas));
    try {
      row.closed_form = omega_closed_form(p.theta);
    } catch (const AlignmentError&) {
      row.closed_form = std::numeric_limits<double>::infinity();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

AvarScan run_avar_scan(const ExperimentConfig& cfg) {
  const SeriesFunction f = series_function(cfg.analysis.f);
  AvarScan scan;
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const GridPoint p = cfg.grid[g];
    const AnisotropicGaussian target = target_at(cfg, p);
    const double horizon = cfg.analysis.horizon_scale / p.epsilon;
    const double delta = cfg.analysis.delta > 0.0
                             ? cfg.analysis.delta
                             : horizon / double(cfg.analysis.n_batches * cfg.analysis.samples_per_batch);
    const Matrix to_y = y_map(cfg, target);
    struct Out {
      double avar = 0.0;
      double acceptance = 0.0;
    };
    const auto outs = parallel_map(cfg.replicas, [&](std::size_t r) {
      Rng rng = replica_rng(cfg, g, r);
      const ReplicaRun run = simulate_replica(cfg, target, horizon, rng);
      const int first[] = {0};
      const GridSeries s = discretize(run.trajectory, delta, first, &to_y);
      Out o;
      o.avar = batch_means_avar(s, f, cfg.analysis.n_batches);
      o.acceptance = run.proposals ? double(run.accepts) / double(run.proposals) : 0.0;
      return o;
    });
    AvarRow row;
    row.point = p;
    std::vector<double> acc;
    for (const Out& o : outs) {
      row.replicas.push_back(o.avar);
      acc.push_back(o.acceptance);
    }
    row.avar = geometric_mean(row.replicas);
    row.log_stderr = stderr_of(logs(row.replicas));
    row.acceptance = mean_of(acc);
    scan.rows.push_back(std::move(row));
  }
  // One regression per theta over every replica estimate.
  std::vector<double> seen;
  for (const AvarRow& row : scan.rows) {
    const double th = row.point.theta;
    const auto same = [th](double x) { return x == th || (std::isnan(x) && std::isnan(th)); };
    if (std::any_of(seen.begin(), seen.end(), same)) continue;
    seen.push_back(th);
    std::vector<std::pair<double, double>> pts;
    for (const AvarRow& other : scan.rows) {
      if (!same(other.point.theta)) continue;
      for (double a : other.replicas) pts.emplace_back(other.point.epsilon, a);
    }
    std::vector<double> distinct;
    for (const auto& pt : pts) {
      if (std::find(distinct.begin(), distinct.end(), pt.first) == distinct.end()) distinct.push_back(pt.first);
    }
    if (pts.size() >= 3 && distinct.size() >= 2) scan.slopes.push_back({th, loglog_slope(pts)});
  }
  return scan;
}

FluidCompare run_fluid_limit(const ExperimentConfig& cfg) {
  require(cfg.sampler == SamplerKind::bps, "sampler", "fluid-limit needs the bps sampler");
  require(cfg.distribution == Distribution::gaussian, "distribution", "fluid-limit needs a gaussian target");
  require(cfg.target.dim == 2, "target.dim", "fluid-limit is planar");
  require(cfg.target.lambda_k(0) == 1.0 && cfg.target.lambda_l(0) == 1.0, "target",
          "fluid-limit needs unit scales");
  const GridPoint p = cfg.grid.front();
  const AnisotropicGaussian target = target_at(cfg, p);
  const FluidSpec& fl = cfg.fluid;

  BpsState init{Vector(2), Vector(2), 0.0};
  init.y << fl.y1, fl.y2;
  init.v << fl.v1, fl.v2;
  Rng rng = replica_rng(cfg, 0, 0);
  const Trajectory traj = bps_simulate(target, init, cfg.horizon, cfg.rho, rng);

  const FluidState start{fl.y1, fl.v1, init.v.norm()};
  const std::vector<FluidState> ode = fluid_integrate(start, cfg.horizon, fl.step);
  const auto stride = static_cast<std::size_t>(std::llround(fl.grid / fl.step));
  const double h0 = conserved_H(start);

  FluidCompare out;
  out.events = traj.event_count();
  for (const FluidState& s : ode) out.h_drift = std::max(out.h_drift, std::abs(conserved_H(s) - h0));
  for (std::size_t n = 0; n * stride < ode.size(); ++n) {
    const FluidState& s = ode[n * stride];
    const double t = double(n * stride) * fl.step;
    const Vector pos = traj.position_at(t);
    const Vector vel = traj.velocity_at(t);
    out.t.push_back(t);
    out.sim_y1.push_back(pos(0));
    out.sim_v1.push_back(vel(0));
    out.sim_speed.push_back(vel.tail(target.l()).norm());
    out.ode_y1.push_back(s.y1);
    out.ode_v1.push_back(s.v1);
    out.ode_speed.push_back(fluid_fast_speed(s));
    out.sup_y1 = std::max(out.sup_y1, std::abs(out.sim_y1.back() - s.y1));
    out.sup_v1 = std::max(out.sup_v1, std::abs(out.sim_v1.back() - s.v1));
    out.sup_speed = std::max(out.sup_speed, std::abs(out.sim_speed.back() - out.ode_speed.back()));
  }
  return out;
}

std::vector<StationarityRow> run_stationarity(const ExperimentConfig& cfg) {
  const double delta = cfg.analysis.delta > 0.0 ? cfg.analysis.delta : cfg.horizon / 1e5;
  std::vector<StationarityRow> rows;
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const GridPoint p = cfg.grid[g];
    const AnisotropicGaussian target = target_at(cfg, p);
    const Matrix map = standardising_map(cfg, target);
    const auto moments = parallel_map(cfg.replicas, [&](std::size_t r) {
      Rng rng = replica_rng(cfg, g, r);
      const ReplicaRun run = simulate_replica(cfg, target, cfg.horizon, rng);
      return moment_check(discretize(run.trajectory, delta, {}, &map));
    });
    for (int r = 0; r < cfg.replicas; ++r) rows.push_back({p, r, moments[r]});
  }
  return rows;
}

std::vector<SimulateRow> run_simulate(const ExperimentConfig& cfg) {
  const double delta = cfg.analysis.delta > 0.0 ? cfg.analysis.delta : cfg.horizon / 1e4;
  std::vector<SimulateRow> rows;
  if (cfg.emit_events) fs::create_directories(cfg.outputs / "events");
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const GridPoint p = cfg.grid[g];
    const AnisotropicGaussian target = target_at(cfg, p);
    const Matrix map = standardising_map(cfg, target);
    const auto part = parallel_map(cfg.replicas, [&](std::size_t r) {
      Rng rng = replica_rng(cfg, g, r);
      const ReplicaRun run = simulate_replica(cfg, target, cfg.horizon, rng);
      SimulateRow row;
      row.point = p;
      row.replica = static_cast<int>(r);
      row.counts = run.trajectory.counts();
      row.acceptance = run.proposals ? double(run.accepts) / double(run.proposals) : 0.0;
      const GridSeries s = discretize(run.trajectory, delta, {}, &map);
      if (s.size() >= 100) row.moments = moment_check(s);
      if (cfg.emit_events) {
        std::ostringstream name;
        name << "events_g" << g << "_r" << r << ".csv";
        std::ofstream out(cfg.outputs / "events" / name.str(), std::ios::binary);
        run.trajectory.write_csv(out, cfg.sampler == SamplerKind::zigzag);
      }
      return row;
    });
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

int run(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log) {
  fs::create_directories(cfg.outputs);
  json summary = {{"subcommand", subcommand},
                  {"seed", cfg.master_seed},
                  {"config", cfg.echo},
                  {"replicas", json::array()},
                  {"aggregate", json::object()}};
  const std::string sampler = to_string(cfg.sampler);
  const std::string dist = to_string(cfg.distribution);

  if (subcommand == "jump-count") {
    const auto rows = run_jump_counts(cfg);
    CsvWriter csv(cfg.outputs / "jump_counts.csv",
                  {"epsilon", "mean_count", "formula", "limit", "stderr", "theta", "sampler"});
    for (const auto& row : rows) {
      csv.row({fmt(row.point.epsilon), fmt(row.mean_count), fmt(row.formula), fmt(row.limit),
               fmt(row.stderr_count), fmt(row.point.theta), sampler});
      summary["replicas"].push_back({{"theta", row.point.theta}, {"epsilon", row.point.epsilon}, {"counts", row.counts}});
      log << "eps=" << row.point.epsilon << " mean=" << row.mean_count << " se=" << row.stderr_count
          << " formula=" << row.formula << '\n';
    }
  } else if (subcommand == "omega-scan") {
    const auto rows = run_omega_scan(cfg);
    CsvWriter csv(cfg.outputs / "omega_scan.csv", {"theta", "estimate", "closed_form", "log_stderr"});
    for (const auto& row : rows) {
      csv.row({fmt(row.theta), fmt(row.estimate), fmt(row.closed_form), fmt(row.log_stderr)});
      summary["replicas"].push_back({{"theta", row.theta}, {"qv", row.replicas}});
      log << "theta=" << row.theta << " estimate=" << row.estimate << " closed_form=" << row.closed_form << '\n';
    }
  } else if (subcommand == "avar-scan") {
    const AvarScan scan = run_avar_scan(cfg);
    CsvWriter csv(cfg.outputs / "avar_scan.csv",
                  {"epsilon", "avar", "stderr", "theta", "distribution", "sampler", "acceptance"});
    for (const auto& row : scan.rows) {
      csv.row({fmt(row.point.epsilon), fmt(row.avar), fmt(row.log_stderr), fmt(row.point.theta), dist,
               sampler, fmt(row.acceptance)});
      summary["replicas"].push_back({{"theta", row.point.theta}, {"epsilon", row.point.epsilon}, {"avar", row.replicas}});
      log << "theta=" << row.point.theta << " eps=" << row.point.epsilon << " avar=" << row.avar << '\n';
    }
    CsvWriter slopes(cfg.outputs / "slopes.csv", {"distribution", "sampler", "theta", "slope", "stderr"});
    json agg = json::array();
    for (const auto& s : scan.slopes) {
      slopes.row({dist, sampler, fmt(s.theta), fmt(s.fit.slope), fmt(s.fit.slope_stderr)});
      agg.push_back({{"theta", s.theta}, {"slope", s.fit.slope}, {"stderr", s.fit.slope_stderr}});
      log << "slope theta=" << s.theta << " " << s.fit.slope << " +- " << s.fit.slope_stderr << '\n';
    }
    summary["aggregate"]["slopes"] = agg;
  } else if (subcommand == "fluid-limit") {
    const FluidCompare fc = run_fluid_limit(cfg);
    CsvWriter csv(cfg.outputs / "fluid_compare.csv",
                  {"t", "sim_y1", "sim_v1", "sim_speedL", "ode_y1", "ode_v1", "ode_speedL"});
    for (std::size_t i = 0; i < fc.t.size(); ++i) {
      csv.row({fmt(fc.t[i]), fmt(fc.sim_y1[i]), fmt(fc.sim_v1[i]), fmt(fc.sim_speed[i]), fmt(fc.ode_y1[i]),
               fmt(fc.ode_v1[i]), fmt(fc.ode_speed[i])});
    }
    summary["aggregate"] = {{"sup_y1", fc.sup_y1},     {"sup_v1", fc.sup_v1}, {"sup_speedL", fc.sup_speed},
                            {"h_drift", fc.h_drift}, {"events", fc.events}};
    log << "sup |y1|=" << fc.sup_y1 << " |v1|=" << fc.sup_v1 << " |v_L|=" << fc.sup_speed
        << " H drift=" << fc.h_drift << '\n';
  } else if (subcommand == "stationarity") {
    const auto rows = run_stationarity(cfg);
    CsvWriter csv(cfg.outputs / "stationarity.csv",
                  {"theta", "epsilon", "replica", "max_abs_mean", "max_var_dev", "max_abs_offdiag", "sampler"});
    for (const auto& row : rows) {
      csv.row({fmt(row.point.theta), fmt(row.point.epsilon), std::to_string(row.replica),
               fmt(row.moments.max_abs_mean), fmt(row.moments.max_var_dev), fmt(row.moments.max_abs_offdiag),
               sampler});
      json j = moments_json(row.moments);
      j["theta"] = row.point.theta;
      j["epsilon"] = row.point.epsilon;
      j["replica"] = row.replica;
      summary["replicas"].push_back(j);
      log << "theta=" << row.point.theta << " eps=" << row.point.epsilon << " |mean|=" << row.moments.max_abs_mean
          << " |var-1|=" << row.moments.max_var_dev << '\n';
    }
  } else if (subcommand == "simulate") {
    const auto rows = run_simulate(cfg);
    CsvWriter csv(cfg.outputs / "simulate.csv",
                  {"theta", "epsilon", "replica", "events", "acceptance", "max_abs_mean", "max_var_dev"});
    for (const auto& row : rows) {
      csv.row({fmt(row.point.theta), fmt(row.point.epsilon), std::to_string(row.replica),
               std::to_string(row.counts.total()), fmt(row.acceptance), fmt(row.moments.max_abs_mean),
               fmt(row.moments.max_var_dev)});
      json j = moments_json(row.moments);
      j["theta"] = row.point.theta;
      j["epsilon"] = row.point.epsilon;
      j["replica"] = row.replica;
      j["flips"] = row.counts.flips;
      j["reflections"] = row.counts.reflections;
      j["refreshes"] = row.counts.refreshes;
      j["acceptance"] = row.acceptance;
      summary["replicas"].push_back(j);
    }
    log << "simulated " << rows.size() << " trajectories\n";
  } else {
    throw InvalidArgument("unknown subcommand '" + subcommand + "'");
  }
  write_json(cfg.outputs / (subcommand + "_summary.json"), summary);
  return 0;
}

}  // namespace pdmp
