#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdmp/analysis.hpp"
#include "pdmp/model.hpp"

namespace pdmp {

enum class SamplerKind { zigzag, bps };
enum class Distribution { gaussian, student };

std::string to_string(SamplerKind s);
std::string to_string(Distribution d);

/// Target block of a config. Either `theta` (planar shortcut) or an explicit
/// rotation `U` is given.
struct TargetSpec {
  int dim = 2;
  std::optional<double> theta;
  std::optional<Matrix> rotation;
  Vector lambda_k = Vector::Ones(1);
  Vector lambda_l = Vector::Ones(1);
  double epsilon = 0.1;
  std::optional<double> student_nu;

  /// Gaussian target at the given grid point (theta is ignored with an explicit U).
  AnisotropicGaussian build(double theta, double epsilon) const;
};

struct AnalysisSpec {
  double delta = 0.0;              ///< 0 selects the per-subcommand default
  int n_batches = 30;
  int samples_per_batch = 100;     ///< avar grid: delta = T / (n_batches * samples_per_batch)
  std::string f = "y1_squared";    ///< "y1_squared" or "y1"
  double horizon_scale = 10.0;     ///< avar horizon T = horizon_scale / eps
};

struct FluidSpec {
  double y1 = 1.0;
  double v1 = 0.5;
  double y2 = 0.5;
  double v2 = 1.0;
  double step = 1e-3;   ///< RK4 step
  double grid = 1e-2;   ///< comparison grid, a multiple of step
};

struct GridPoint {
  double theta;  ///< NaN when the target has an explicit rotation
  double epsilon;
};

struct ExperimentConfig {
  SamplerKind sampler = SamplerKind::zigzag;
  Distribution distribution = Distribution::gaussian;
  TargetSpec target;
  double horizon = 100.0;
  double rho = 1.0;
  int replicas = 1;
  std::uint64_t master_seed = 0;
  std::vector<GridPoint> grid;
  std::filesystem::path outputs = "out";
  bool emit_events = false;
  AnalysisSpec analysis;
  FluidSpec fluid;
  nlohmann::json echo;  ///< merged configuration, echoed into summaries
};

/// Built-in defaults of a subcommand as a JSON document.
nlohmann::json default_config(const std::string& subcommand);

/// Validate and convert a JSON document. Errors are ConfigError with the
/// offending field path, e.g. "target.epsilon".
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Parse an angle: a number, or text such as "pi/6", "2pi/3", "0.25*pi".
double parse_angle(const nlohmann::json& value, const std::string& path);

const std::vector<std::string>& subcommands();

// ---- experiment drivers -----------------------------------------------------

struct JumpCountRow {
  GridPoint point;
  double mean_count = 0.0;
  double stderr_count = 0.0;
  double formula = 0.0;  ///< exact expectation (ZZ) or upper bound (BPS)
  double limit = 0.0;    ///< small-eps asymptotic count, limit / eps
  std::vector<double> counts;
};

struct OmegaScanRow {
  double theta = 0.0;
  double estimate = 0.0;  ///< geometric mean over replicas
  double log_stderr = 0.0;
  double closed_form = 0.0;  ///< +inf at aligned angles
  std::vector<double> replicas;
};

struct AvarRow {
  GridPoint point;
  double avar = 0.0;  ///< geometric mean over replicas
  double log_stderr = 0.0;
  double acceptance = 0.0;  ///< Student thinning acceptance, 0 otherwise
  std::vector<double> replicas;
};

struct SlopeRow {
  double theta = 0.0;
  RegressionFit fit;
};

struct AvarScan {
  std::vector<AvarRow> rows;
  std::vector<SlopeRow> slopes;
};

struct FluidCompare {
  std::vector<double> t;
  std::vector<double> sim_y1, sim_v1, sim_speed;
  std::vector<double> ode_y1, ode_v1, ode_speed;
  double sup_y1 = 0.0, sup_v1 = 0.0, sup_speed = 0.0;
  double h_drift = 0.0;  ///< max |H(t) - H(0)| along the ODE
  std::size_t events = 0;
};

struct StationarityRow {
  GridPoint point;
  int replica = 0;
  MomentDeviation moments;
};

struct SimulateRow {
  GridPoint point;
  int replica = 0;
  EventCounts counts;
  double acceptance = 0.0;
  MomentDeviation moments;
};

std::vector<JumpCountRow> run_jump_counts(const ExperimentConfig& cfg);
std::vector<OmegaScanRow> run_omega_scan(const ExperimentConfig& cfg);
AvarScan run_avar_scan(const ExperimentConfig& cfg);
FluidCompare run_fluid_limit(const ExperimentConfig& cfg);
std::vector<StationarityRow> run_stationarity(const ExperimentConfig& cfg);
std::vector<SimulateRow> run_simulate(const ExperimentConfig& cfg);

/// Run a subcommand and write its CSV tables and summary JSON into
/// cfg.outputs. Returns the process exit status.
int run(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log);

}  // namespace pdmp
