// Acceptance suite: one PASS/FAIL line per criterion.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdmp/analysis.hpp"
#include "pdmp/bps.hpp"
#include "pdmp/event_clock.hpp"
#include "pdmp/experiment.hpp"
#include "pdmp/limits.hpp"
#include "pdmp/parallel.hpp"
#include "pdmp/zigzag.hpp"

using namespace pdmp;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " | " << detail << std::endl;
  if (!ok) ++failures;
}

std::string num(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double stderr_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / double(v.size() - 1) / double(v.size()));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, int columns) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::vector<double> row;
    for (int c = 0; c < columns && std::getline(cells, cell, ','); ++c) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

double ks_survival(LinearHazard h, int n, Rng& rng) {
  std::vector<double> xs(n);
  for (double& x : xs) x = first_arrival_linear(h, rng.exponential());
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = std::isfinite(xs[i]) ? 1.0 - survival_linear(h, xs[i]) : 1.0;
    if (!std::isfinite(xs[i])) {
      d = std::max(d, std::abs(double(i) / n - (1.0 - std::exp(-integrated_hazard(h, 1e300)))));
      break;
    }
    d = std::max({d, std::abs(double(i + 1) / n - f), std::abs(f - double(i) / n)});
  }
  return d;
}

void criterion_1() {
  const LinearHazard hs[] = {{0.5, 2.0}, {-1.5, 1.0}, {1.3, 0.0}, {-0.5, -1.0}, {1.0, -0.8}};
  Rng rng(101);
  double worst = 0.0;
  for (const LinearHazard& h : hs) worst = std::max(worst, ks_survival(h, 100000, rng));
  report(1, worst < 0.01, "hazard-law KS over five inversion branches", "max KS = " + num(worst));
}

void criterion_2() {
  bool ok = true;
  std::string detail;
  for (SamplerKind s : {SamplerKind::zigzag, SamplerKind::bps}) {
    nlohmann::json doc = default_config("stationarity");
    doc["sampler"] = to_string(s);
    doc["rho"] = 1.0;
    const auto rows = run_stationarity(parse_config(doc));
    for (const auto& row : rows) {
      const bool pass = row.moments.max_abs_mean < 0.05 && row.moments.max_var_dev < 0.05;
      ok = ok && pass;
      detail += to_string(s) + " eps=" + num(row.point.epsilon) + ": |mean|=" + num(row.moments.max_abs_mean, 3) +
                " |var-1|=" + num(row.moments.max_var_dev, 3) + "; ";
    }
  }
  report(2, ok, "stationary y-moments, T=1e4", detail);
}

void criterion_3(const std::vector<std::vector<double>>& rows, double horizon) {
  // columns: epsilon, mean_count, formula (exact), limit, stderr
  bool ok = true;
  std::string detail;
  bool exact_ok = true;
  for (const auto& r : rows) {
    const double printed = 0.5 * r[2];  // printed constant T/(2 sqrt(2 pi)) is half the exact value
    ok = ok && std::abs(r[1] - printed) < 3.0 * r[4];
    exact_ok = exact_ok && std::abs(r[1] - r[2]) < 3.0 * r[4];
    detail += "eps=" + num(r[0]) + " mean=" + num(r[1], 6) + " se=" + num(r[4], 3) + " printed=" + num(printed, 6) +
              " ratio=" + num(r[1] / printed) + "; ";
  }
  // eps -> 0: eps * mean against the limit
  const AnisotropicGaussian t = AnisotropicGaussian::planar(pi / 6, 1e-3);
  const auto counts = parallel_map(50, [&](std::size_t r) {
    Rng rng = Rng::for_replica(777, r);
    return double(zz_simulate(t, zz_stationary_init(t, rng), horizon, rng).counts().total());
  });
  const double scaled = 1e-3 * mean_of(counts);
  const double exact_limit = zz_jump_limit(t, horizon);
  const double printed_limit = 0.5 * exact_limit;
  const bool lim_ok = std::abs(scaled / printed_limit - 1.0) < 0.05;
  const bool lim_exact = std::abs(scaled / exact_limit - 1.0) < 0.05;
  detail += "eps=1e-3: eps*mean=" + num(scaled, 6) + " printed limit=" + num(printed_limit, 6) +
            "; against T/sqrt(2pi) sum sqrt(theta_ii): counts within 3 SE " + (exact_ok ? "yes" : "no") +
            ", limit within 5% " + (lim_exact ? "yes" : "no");
  report(3, ok && lim_ok, "ZZ jump counts against the printed formula", detail);
}

void criterion_4() {
  bool bound_ok = true;
  std::string detail;
  nlohmann::json doc = default_config("jump-count");
  doc["sampler"] = "bps";
  doc["rho"] = 1.0;
  doc["horizon"] = 1000.0;
  for (const auto& row : run_jump_counts(parse_config(doc))) {
    const bool ok = row.mean_count <= row.formula + 3.0 * row.stderr_count;
    bound_ok = bound_ok && ok;
    detail += "rho=1 eps=" + num(row.point.epsilon) + " mean=" + num(row.mean_count, 6) + " bound=" +
              num(row.formula, 6) + "; ";
  }
  const double horizon = 10.0;
  const AnisotropicGaussian t = AnisotropicGaussian::planar(pi / 6, 1e-3);
  const auto counts = parallel_map(2000, [&](std::size_t r) {
    Rng rng = Rng::for_replica(4242, r);
    return double(bps_simulate(t, bps_stationary_init(t, rng), horizon, 0.0, rng).counts().total());
  });
  const double scaled = 1e-3 * mean_of(counts);
  const double se = 1e-3 * stderr_of(counts);
  const double printed = horizon / (2.0 * pi);
  const bool lim_ok = std::abs(scaled / printed - 1.0) < 0.10;
  const double exact = bps_expected_jumps(t, horizon, 0.0).limit;
  detail += "rho=0 l=1 eps=1e-3 T=10: eps*mean=" + num(scaled, 5) + " (se " + num(se, 2) + ") printed T/(2pi)=" +
            num(printed, 5) + " ratio=" + num(scaled / printed) + "; T/pi=" + num(exact, 5) + " within 10% " +
            (std::abs(scaled / exact - 1.0) < 0.10 ? "yes" : "no");
  report(4, bound_ok && lim_ok, "BPS jump-count bound and small-eps limit", detail);
}

void criterion_5() {
  const auto rows = run_omega_scan(parse_config(default_config("omega-scan")));
  bool ok = true;
  std::string detail;
  for (const auto& row : rows) {
    const double rel = std::abs(row.estimate / row.closed_form - 1.0);
    ok = ok && rel < 0.15 && row.replicas.size() >= 20;
    detail += "theta=" + num(row.theta) + " est=" + num(row.estimate) + " closed=" + num(row.closed_form) + "; ";
  }
  report(5, ok, "Omega(theta) from quadratic variation, eps=1e-3, T=2", detail);
}

void criterion_6() {
  const FluidCompare fc = run_fluid_limit(parse_config(default_config("fluid-limit")));
  const bool ok = fc.sup_y1 < 0.1 && fc.sup_v1 < 0.1 && fc.sup_speed < 0.1 && fc.h_drift < 1e-8;
  report(6, ok, "BPS fluid limit at eps=1e-4 over [0,10]",
         "sup y1=" + num(fc.sup_y1) + " v1=" + num(fc.sup_v1) + " |v_L|=" + num(fc.sup_speed) +
             " H drift=" + num(fc.h_drift));
}

double slope_of(nlohmann::json doc) {
  const AvarScan scan = run_avar_scan(parse_config(doc));
  return scan.slopes.at(0).fit.slope;
}

void criterion_7() {
  nlohmann::json base = default_config("avar-scan");
  nlohmann::json zz = base;
  nlohmann::json bps = base;
  bps["sampler"] = "bps";
  nlohmann::json aligned = base;
  aligned["grid"]["theta"] = {0.0};
  nlohmann::json student = base;
  student["distribution"] = "student";
  student["target"]["student_nu"] = 4.0;
  const double s_zz = slope_of(zz), s_bps = slope_of(bps), s_al = slope_of(aligned), s_st = slope_of(student);
  const bool ok = std::abs(s_zz - 1.0) <= 0.2 && std::abs(s_bps) <= 0.2 && std::abs(s_al) <= 0.25 &&
                  std::abs(s_st - 0.95) <= 0.25;
  report(7, ok, "avar log-log slopes, eps in {0.1,0.03,0.01,0.003}, 20 replicas",
         "ZZ pi/6=" + num(s_zz, 3) + " BPS=" + num(s_bps, 3) + " ZZ theta=0=" + num(s_al, 3) +
             " Student ZZ pi/6=" + num(s_st, 3));
}

void criterion_8() {
  Rng rng(8);
  const Trajectory traj = fast_subsystem_simulate(Vector{{1.0, 0.0}}, Vector{{0.0, 1.0}}, 1e5, rng);
  const double avg = fast_subsystem_averages(traj).mean_bounce_intensity;
  const CCoefficient c = c_coeff(1.0, 1.0);
  const bool pos = std::abs(avg / c.positive_part - 1.0) < 0.02;
  const bool full = std::abs(avg / c.full_line - 1.0) < 0.02;
  report(8, pos != full, "c(1,1) oracle selects one candidate",
         "time average=" + num(avg, 5) + " positive-part=" + num(c.positive_part, 5) + " full-line=" +
             num(c.full_line, 5) + " selected=" + (pos ? "positive-part" : full ? "full-line" : "none"));
}

void criterion_9() {
  Rng rng(909);
  double worst_speed = 0.0, worst_inv = 0.0, worst_normal = 0.0, worst_recon = 0.0;
  bool single_flip = true;
  const int states = 10000;
  for (int s = 0; s < states; ++s) {
    const int d = 2 + s % 4;
    const int k = 1 + s % (d - 1);
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
    const Matrix u = Eigen::HouseholderQR<Matrix>(g).householderQ();
    Vector lk(k), ll(d - k);
    for (int i = 0; i < k; ++i) lk(i) = 0.5 + rng.uniform();
    for (int i = 0; i < d - k; ++i) ll(i) = 0.5 + rng.uniform();
    const AnisotropicGaussian t(u, lk, ll, std::pow(10.0, -3.0 * rng.uniform()));

    // BPS reflection
    Vector y(d), v(d);
    for (int i = 0; i < d; ++i) {
      y(i) = rng.normal();
      v(i) = rng.normal();
    }
    const Vector n = t.inverse_scales().cwiseProduct(y);
    const Vector r = bps_reflect(y, v, t);
    worst_speed = std::max(worst_speed, std::abs(r.norm() - v.norm()) / v.norm());
    worst_inv = std::max(worst_inv, (bps_reflect(y, r, t) - v).norm() / v.norm());
    worst_normal = std::max(worst_normal, std::abs(r.dot(n) + v.dot(n)) / (v.norm() * n.norm()));

    // ZZ flips and reconstruction along a short run from this state
    ZigZagState zs{y, Vector(d), 0.0};
    for (int i = 0; i < d; ++i) zs.v(i) = rng.sign();
    const Trajectory traj = zz_simulate(t, zs, 0.2 * t.epsilon(), rng);
    for (std::size_t e = 1; e < traj.segment_count(); ++e) {
      const Vector dv = traj.velocity(e) - traj.velocity(e - 1);
      single_flip = single_flip && (dv.array() != 0.0).count() == 1 && dv.cwiseAbs().maxCoeff() == 2.0 &&
                    traj.event(e).coord >= 0 && dv(traj.event(e).coord) != 0.0;
      const Vector pred = traj.position(e - 1) + (traj.time(e) - traj.time(e - 1)) * t.flow() * traj.velocity(e - 1);
      const double scale = 1.0 + traj.position(e).cwiseAbs().maxCoeff();
      worst_recon = std::max(worst_recon, (traj.position(e) - pred).cwiseAbs().maxCoeff() / scale);
    }
  }
  const bool ok = worst_speed < 1e-12 && worst_inv < 1e-12 && worst_normal < 1e-12 && worst_recon < 1e-12 &&
                  single_flip;
  report(9, ok, "reflection and flip properties on 1e4 random states",
         "speed=" + num(worst_speed, 2) + " involution=" + num(worst_inv, 2) + " normal=" + num(worst_normal, 2) +
             " reconstruction=" + num(worst_recon, 2) + " single flips=" + (single_flip ? "yes" : "no"));
}

int run_cli(const std::string& cli, const fs::path& config, const fs::path& out) {
  const std::string cmd = "\"" + cli + "\" jump-count --config \"" + config.string() + "\" --seed 20240601 --out \"" +
                          out.string() + "\" > \"" + (out.string() + ".log") + "\" 2>&1";
  return std::system(cmd.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::string cli;
  std::string workdir = "acceptance_runs";
  app.add_option("--cli", cli, "path to the pdmp-aniso binary")->required();
  app.add_option("--workdir", workdir, "scratch directory");
  CLI11_PARSE(app, argc, argv);

  fs::remove_all(workdir);
  fs::create_directories(workdir);
  const double jump_horizon = 1000.0;
  const fs::path config = fs::path(workdir) / "jump_count.json";
  {
    nlohmann::json doc = {{"horizon", jump_horizon},
                          {"replicas", 50},
                          {"grid", {{"theta", {"pi/6"}}, {"epsilon", {1.0, 0.1, 0.01}}}}};
    std::ofstream(config) << doc.dump(2) << '\n';
  }
  const fs::path run_a = fs::path(workdir) / "jump_a";
  const fs::path run_b = fs::path(workdir) / "jump_b";

  try {
    criterion_1();
    criterion_2();
    if (run_cli(cli, config, run_a) != 0) {
      report(3, false, "ZZ jump counts", "CLI run failed, see " + run_a.string() + ".log");
    } else {
      criterion_3(read_csv(run_a / "jump_counts.csv", 5), jump_horizon);
    }
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    const int rc = run_cli(cli, config, run_b);
    const std::string a = slurp(run_a / "jump_counts.csv");
    const std::string b = slurp(run_b / "jump_counts.csv");
    report(10, rc == 0 && !a.empty() && a == b, "byte-identical rerun of the jump-count command",
           "jump_counts.csv " + std::to_string(a.size()) + " bytes, identical=" + (a == b ? "yes" : "no"));
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << failures << " criteria failed" << std::endl;
  return failures == 0 ? 0 : 1;
}
