#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "pdmp/errors.hpp"
#include "pdmp/experiment.hpp"

namespace pdmp {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& known) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double get_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  return v.get<double>();
}

Vector get_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array of numbers");
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
    out(i) = v[i].get<double>();
  }
  return out;
}

std::vector<double> get_angles(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(parse_angle(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> get_epsilons(const json& v, const std::string& path) {
  const Vector e = get_vector(v, path);
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (!(e(i) > 0.0)) throw ConfigError(path + "[" + std::to_string(i) + "]", "epsilon must be > 0");
  }
  return {e.data(), e.data() + e.size()};
}

}  // namespace

std::string to_string(SamplerKind s) { return s == SamplerKind::zigzag ? "zigzag" : "bps"; }
std::string to_string(Distribution d) { return d == Distribution::gaussian ? "gaussian" : "student"; }

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"simulate",  "omega-scan", "fluid-limit",
                                              "jump-count", "avar-scan", "stationarity"};
  return names;
}

double parse_angle(const json& value, const std::string& path) {
  if (value.is_number()) {
    const double x = value.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "angle must be finite");
    return x;
  }
  if (!value.is_string()) throw ConfigError(path, "expected a number or an expression like \"pi/6\"");
  std::string s;
  for (char c : value.get<std::string>()) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(c));
  }
  const auto pos = s.find("pi");
  if (pos == std::string::npos) throw ConfigError(path, "cannot parse angle '" + s + "'");
  try {
    double factor = 1.0;
    std::string head = s.substr(0, pos);
    if (!head.empty() && head.back() == '*') head.pop_back();
    if (head == "-") factor = -1.0;
    else if (!head.empty()) {
      std::size_t used = 0;
      factor = std::stod(head, &used);
      if (used != head.size()) throw std::invalid_argument(head);
    }
    double divisor = 1.0;
    const std::string tail = s.substr(pos + 2);
    if (!tail.empty()) {
      if (tail.front() != '/') throw std::invalid_argument(tail);
      std::size_t used = 0;
      divisor = std::stod(tail.substr(1), &used);
      if (used != tail.size() - 1 || divisor == 0.0) throw std::invalid_argument(tail);
    }
    return factor * std::numbers::pi / divisor;
  } catch (const std::exception&) {
    throw ConfigError(path, "cannot parse angle '" + s + "'");
  }
}

AnisotropicGaussian TargetSpec::build(double theta_value, double eps) const {
  if (rotation) return AnisotropicGaussian(*rotation, lambda_k, lambda_l, eps);
  return AnisotropicGaussian(make_rotation_2d(theta_value), lambda_k, lambda_l, eps);
}

json default_config(const std::string& subcommand) {
  json base = {{"sampler", "zigzag"},
               {"distribution", "gaussian"},
               {"target", {{"dim", 2}, {"theta", "pi/6"}, {"epsilon", 0.1}}},
               {"horizon", 100.0},
               {"rho", 1.0},
               {"replicas", 1},
               {"master_seed", 20240601},
               {"outputs", "out"},
               {"emit_events", false}};
  if (subcommand == "omega-scan") {
    base["replicas"] = 20;
    base["horizon"] = 2.0;
    base["grid"] = {{"theta", {0.15, 0.3, 0.45, 0.6}}, {"epsilon", {0.001}}};
  } else if (subcommand == "fluid-limit") {
    base["sampler"] = "bps";
    base["rho"] = 0.0;
    base["horizon"] = 10.0;
    base["target"]["theta"] = 0.0;
    base["target"]["epsilon"] = 1e-4;
  } else if (subcommand == "jump-count") {
    base["replicas"] = 50;
    base["grid"] = {{"theta", {"pi/6"}}, {"epsilon", {1.0, 0.1, 0.01}}};
  } else if (subcommand == "avar-scan") {
    base["replicas"] = 20;
    base["grid"] = {{"theta", {"pi/6"}}, {"epsilon", {0.1, 0.03, 0.01, 0.003}}};
  } else if (subcommand == "stationarity") {
    base["horizon"] = 1e4;
    base["grid"] = {{"theta", {"pi/6"}}, {"epsilon", {0.1, 0.01}}};
  }
  return base;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
  reject_unknown(doc, "", {"sampler", "distribution", "target", "horizon", "rho", "replicas",
                           "master_seed", "grid", "outputs", "emit_events", "analysis", "fluid"});
  ExperimentConfig cfg;
  cfg.echo = doc;

  if (doc.contains("sampler")) {
    const json& s = doc.at("sampler");
    if (s == "zigzag") cfg.sampler = SamplerKind::zigzag;
    else if (s == "bps") cfg.sampler = SamplerKind::bps;
    else throw ConfigError("sampler", "expected \"zigzag\" or \"bps\"");
  }
  if (doc.contains("distribution")) {
    const json& s = doc.at("distribution");
    if (s == "gaussian") cfg.distribution = Distribution::gaussian;
    else if (s == "student") cfg.distribution = Distribution::student;
    else throw ConfigError("distribution", "expected \"gaussian\" or \"student\"");
  }

  // target
  if (!doc.contains("target") || !doc.at("target").is_object()) {
    throw ConfigError("target", "missing target block");
  }
  const json& t = doc.at("target");
  reject_unknown(t, "target", {"dim", "theta", "U", "lambda_K", "lambda_L", "epsilon", "student_nu"});
  TargetSpec& spec = cfg.target;
  if (t.contains("dim")) {
    if (!t.at("dim").is_number_integer() || t.at("dim").get<int>() < 2) {
      throw ConfigError("target.dim", "expected an integer >= 2");
    }
    spec.dim = t.at("dim").get<int>();
  }
  if (t.contains("U")) {
    const json& u = t.at("U");
    if (!u.is_array() || static_cast<int>(u.size()) != spec.dim) {
      throw ConfigError("target.U", "expected " + std::to_string(spec.dim) + " rows");
    }
    Matrix m(spec.dim, spec.dim);
    for (int i = 0; i < spec.dim; ++i) {
      const Vector row = get_vector(u[i], "target.U[" + std::to_string(i) + "]");
      if (row.size() != spec.dim) {
        throw ConfigError("target.U[" + std::to_string(i) + "]", "wrong row length");
      }
      m.row(i) = row.transpose();
    }
    spec.rotation = m;
  } else if (t.contains("theta")) {
    if (spec.dim != 2) throw ConfigError("target.theta", "theta requires dim = 2; give U instead");
    spec.theta = parse_angle(t.at("theta"), "target.theta");
  } else {
    throw ConfigError("target", "give either theta (dim = 2) or U");
  }
  if (t.contains("lambda_K")) spec.lambda_k = get_vector(t.at("lambda_K"), "target.lambda_K");
  if (t.contains("lambda_L")) spec.lambda_l = get_vector(t.at("lambda_L"), "target.lambda_L");
  if (!t.contains("lambda_K") && !t.contains("lambda_L") && spec.dim != 2) {
    spec.lambda_k = Vector::Ones(1);
    spec.lambda_l = Vector::Ones(spec.dim - 1);
  }
  if (spec.lambda_k.size() + spec.lambda_l.size() != spec.dim) {
    throw ConfigError("target.lambda_L", "lambda_K and lambda_L sizes must add up to dim");
  }
  for (Eigen::Index i = 0; i < spec.lambda_k.size(); ++i) {
    if (!(spec.lambda_k(i) > 0.0)) throw ConfigError("target.lambda_K", "entries must be > 0");
  }
  for (Eigen::Index i = 0; i < spec.lambda_l.size(); ++i) {
    if (!(spec.lambda_l(i) > 0.0)) throw ConfigError("target.lambda_L", "entries must be > 0");
  }
  spec.epsilon = get_number(t, "epsilon", "target", spec.epsilon);
  if (!(spec.epsilon > 0.0)) throw ConfigError("target.epsilon", "must be > 0");
  if (t.contains("student_nu")) {
    const double nu = get_number(t, "student_nu", "target", 0.0);
    if (!(nu > 2.0)) throw ConfigError("target.student_nu", "must be > 2");
    spec.student_nu = nu;
  }
  if (cfg.distribution == Distribution::student) {
    if (!spec.student_nu) throw ConfigError("target.student_nu", "required for the student distribution");
    if (cfg.sampler != SamplerKind::zigzag) {
      throw ConfigError("sampler", "student targets are supported for zigzag only");
    }
  }
  try {
    (void)spec.build(spec.theta.value_or(0.0), spec.epsilon);
  } catch (const Error& e) {
    throw ConfigError("target", e.what());
  }

  cfg.horizon = get_number(doc, "horizon", "", cfg.horizon);
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw ConfigError("horizon", "must be > 0");
  cfg.rho = get_number(doc, "rho", "", cfg.rho);
  if (!(cfg.rho >= 0.0)) throw ConfigError("rho", "must be >= 0");
  if (doc.contains("replicas")) {
    if (!doc.at("replicas").is_number_integer() || doc.at("replicas").get<long long>() < 1) {
      throw ConfigError("replicas", "expected an integer >= 1");
    }
    cfg.replicas = doc.at("replicas").get<int>();
  }
  if (doc.contains("master_seed")) {
    const json& s = doc.at("master_seed");
    if (!s.is_number_integer()) throw ConfigError("master_seed", "expected a nonnegative integer");
    if (s.is_number_unsigned()) cfg.master_seed = s.get<std::uint64_t>();
    else if (s.get<long long>() >= 0) cfg.master_seed = static_cast<std::uint64_t>(s.get<long long>());
    else throw ConfigError("master_seed", "expected a nonnegative integer");
  }
  if (doc.contains("outputs")) {
    if (!doc.at("outputs").is_string()) throw ConfigError("outputs", "expected a path string");
    cfg.outputs = doc.at("outputs").get<std::string>();
  }
  if (doc.contains("emit_events")) {
    if (!doc.at("emit_events").is_boolean()) throw ConfigError("emit_events", "expected true/false");
    cfg.emit_events = doc.at("emit_events").get<bool>();
  }

  // grid
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double own_theta = spec.theta.value_or(nan);
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    if (g.is_array()) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        const std::string p = "grid[" + std::to_string(i) + "]";
        if (!g[i].is_array() || g[i].size() != 2) throw ConfigError(p, "expected [theta, epsilon]");
        const double eps = g[i][1].is_number() ? g[i][1].get<double>() : -1.0;
        if (!(eps > 0.0)) throw ConfigError(p + "[1]", "epsilon must be > 0");
        const double th = spec.rotation ? nan : parse_angle(g[i][0], p + "[0]");
        cfg.grid.push_back({th, eps});
      }
    } else if (g.is_object()) {
      reject_unknown(g, "grid", {"theta", "epsilon"});
      std::vector<double> thetas{own_theta};
      if (g.contains("theta")) {
        if (spec.rotation) throw ConfigError("grid.theta", "not allowed with an explicit U");
        thetas = get_angles(g.at("theta"), "grid.theta");
      }
      std::vector<double> eps{spec.epsilon};
      if (g.contains("epsilon")) eps = get_epsilons(g.at("epsilon"), "grid.epsilon");
      for (double th : thetas) {
        for (double e : eps) cfg.grid.push_back({th, e});
      }
    } else {
      throw ConfigError("grid", "expected an object {theta, epsilon} or a list of pairs");
    }
    if (cfg.grid.empty()) throw ConfigError("grid", "empty grid");
  } else {
    cfg.grid.push_back({own_theta, spec.epsilon});
  }

  if (doc.contains("analysis")) {
    const json& a = doc.at("analysis");
    if (!a.is_object()) throw ConfigError("analysis", "expected an object");
    reject_unknown(a, "analysis", {"delta", "n_batches", "samples_per_batch", "f", "horizon_scale"});
    AnalysisSpec& an = cfg.analysis;
    an.delta = get_number(a, "delta", "analysis", an.delta);
    if (!(an.delta >= 0.0)) throw ConfigError("analysis.delta", "must be >= 0");
    an.n_batches = static_cast<int>(get_number(a, "n_batches", "analysis", an.n_batches));
    if (an.n_batches < 10) throw ConfigError("analysis.n_batches", "must be >= 10");
    an.samples_per_batch =
        static_cast<int>(get_number(a, "samples_per_batch", "analysis", an.samples_per_batch));
    if (an.samples_per_batch < 1) throw ConfigError("analysis.samples_per_batch", "must be >= 1");
    if (a.contains("f")) {
      if (a.at("f") != "y1_squared" && a.at("f") != "y1") {
        throw ConfigError("analysis.f", "expected \"y1_squared\" or \"y1\"");
      }
      an.f = a.at("f").get<std::string>();
    }
    an.horizon_scale = get_number(a, "horizon_scale", "analysis", an.horizon_scale);
    if (!(an.horizon_scale > 0.0)) throw ConfigError("analysis.horizon_scale", "must be > 0");
  }

  if (doc.contains("fluid")) {
    const json& f = doc.at("fluid");
    if (!f.is_object()) throw ConfigError("fluid", "expected an object");
    reject_unknown(f, "fluid", {"y1", "v1", "y2", "v2", "step", "grid"});
    FluidSpec& fl = cfg.fluid;
    fl.y1 = get_number(f, "y1", "fluid", fl.y1);
    fl.v1 = get_number(f, "v1", "fluid", fl.v1);
    fl.y2 = get_number(f, "y2", "fluid", fl.y2);
    fl.v2 = get_number(f, "v2", "fluid", fl.v2);
    fl.step = get_number(f, "step", "fluid", fl.step);
    fl.grid = get_number(f, "grid", "fluid", fl.grid);
    if (!(fl.step > 0.0)) throw ConfigError("fluid.step", "must be > 0");
    if (!(fl.grid >= fl.step)) throw ConfigError("fluid.grid", "must be >= fluid.step");
    const double ratio = fl.grid / fl.step;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
      throw ConfigError("fluid.grid", "must be an integer multiple of fluid.step");
    }
    if (fl.v2 == 0.0) throw ConfigError("fluid.v2", "must be nonzero");
  }
  return cfg;
}

}  // namespace pdmp
