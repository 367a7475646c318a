#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pdmp/analysis.hpp"
#include "pdmp/bps.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/event_clock.hpp"
#include "pdmp/experiment.hpp"
#include "pdmp/limits.hpp"
#include "pdmp/zigzag.hpp"

namespace py = pybind11;
using namespace pdmp;

namespace {

struct PyTrajectory {
  Trajectory traj;

  Vector times() const {
    Vector t(traj.segment_count());
    for (std::size_t k = 0; k < traj.segment_count(); ++k) t(k) = traj.time(k);
    return t;
  }
  Matrix positions() const {
    Matrix m(traj.segment_count(), traj.dim());
    for (std::size_t k = 0; k < traj.segment_count(); ++k) m.row(k) = traj.position(k).transpose();
    return m;
  }
  Matrix velocities() const {
    Matrix m(traj.segment_count(), traj.dim());
    for (std::size_t k = 0; k < traj.segment_count(); ++k) m.row(k) = traj.velocity(k).transpose();
    return m;
  }
  std::vector<std::string> kinds() const {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < traj.segment_count(); ++k) out.emplace_back(to_string(traj.event(k).kind));
    return out;
  }
  Matrix sample(double delta) const {
    const GridSeries s = discretize(traj, delta);
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        s.values.data(), static_cast<Eigen::Index>(s.size()), s.width);
  }
  std::string csv(bool with_coord) const {
    std::ostringstream out;
    traj.write_csv(out, with_coord);
    return out.str();
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Zig-Zag and bouncy particle samplers on anisotropic Gaussian targets";

  // Translators are tried newest first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<AlignmentError>(m, "AlignmentError", PyExc_ValueError);
  py::register_exception<BoundViolation>(m, "BoundViolation", PyExc_RuntimeError);

  py::class_<AnisotropicGaussian>(m, "AnisotropicGaussian")
      .def(py::init<Matrix, Vector, Vector, double>(), py::arg("rotation"), py::arg("lambda_k"),
           py::arg("lambda_l"), py::arg("epsilon"))
      .def_static("planar", &AnisotropicGaussian::planar, py::arg("theta"), py::arg("epsilon"),
                  py::arg("lambda_k") = 1.0, py::arg("lambda_l") = 1.0)
      .def_property_readonly("dim", &AnisotropicGaussian::dim)
      .def_property_readonly("k", &AnisotropicGaussian::k)
      .def_property_readonly("l", &AnisotropicGaussian::l)
      .def_property_readonly("epsilon", &AnisotropicGaussian::epsilon)
      .def("covariance", [](const AnisotropicGaussian& t) { return Matrix(t.covariance()); })
      .def("precision", [](const AnisotropicGaussian& t) { return Matrix(t.precision()); })
      .def("theta_l", &AnisotropicGaussian::theta_l)
      .def("to_y", &AnisotropicGaussian::to_y)
      .def("to_x", &AnisotropicGaussian::to_x);

  m.def("make_rotation_2d", &make_rotation_2d, py::arg("theta"));
  m.def("check_flippability", &check_flippability, py::arg("target"), py::arg("tol") = 1e-12);

  m.def("first_arrival_linear", [](double a, double gamma, double e) { return first_arrival_linear({a, gamma}, e); },
        py::arg("a"), py::arg("gamma"), py::arg("e"));
  m.def("survival_linear", [](double a, double gamma, double t) { return survival_linear({a, gamma}, t); },
        py::arg("a"), py::arg("gamma"), py::arg("t"));
  m.def("mean_first_arrival", [](double a, double gamma) { return mean_first_arrival({a, gamma}); },
        py::arg("a"), py::arg("gamma"));

  py::class_<PyTrajectory>(m, "Trajectory")
      .def_property_readonly("times", &PyTrajectory::times)
      .def_property_readonly("positions", &PyTrajectory::positions)
      .def_property_readonly("velocities", &PyTrajectory::velocities)
      .def_property_readonly("kinds", &PyTrajectory::kinds)
      .def_property_readonly("horizon", [](const PyTrajectory& p) { return p.traj.horizon(); })
      .def_property_readonly("event_count", [](const PyTrajectory& p) { return p.traj.event_count(); })
      .def("position_at", [](const PyTrajectory& p, double t) { return p.traj.position_at(t); })
      .def("sample", &PyTrajectory::sample, py::arg("delta"))
      .def("to_csv", &PyTrajectory::csv, py::arg("with_coord") = true);

  m.def(
      "zz_simulate",
      [](const AnisotropicGaussian& t, double horizon, std::uint64_t seed, std::optional<Vector> y,
         std::optional<Vector> v) {
        Rng rng(seed);
        ZigZagState init = zz_stationary_init(t, rng);
        if (y) init.y = *y;
        if (v) init.v = *v;
        return PyTrajectory{zz_simulate(t, init, horizon, rng)};
      },
      py::arg("target"), py::arg("horizon"), py::arg("seed"), py::arg("y") = py::none(),
      py::arg("v") = py::none());
  m.def(
      "bps_simulate",
      [](const AnisotropicGaussian& t, double horizon, double rho, std::uint64_t seed, std::optional<Vector> y,
         std::optional<Vector> v) {
        Rng rng(seed);
        BpsState init = bps_stationary_init(t, rng);
        if (y) init.y = *y;
        if (v) init.v = *v;
        return PyTrajectory{bps_simulate(t, init, horizon, rho, rng)};
      },
      py::arg("target"), py::arg("horizon"), py::arg("rho"), py::arg("seed"), py::arg("y") = py::none(),
      py::arg("v") = py::none());
  m.def(
      "zz_simulate_student",
      [](const AnisotropicGaussian& base, double nu, double horizon, std::uint64_t seed) {
        const StudentTarget st(base, nu);
        Rng rng(seed);
        StudentRun run = zz_simulate_student(st, zz_student_stationary_init(st, rng), horizon, rng);
        return py::make_tuple(PyTrajectory{std::move(run.trajectory)}, run.acceptance());
      },
      py::arg("target"), py::arg("nu"), py::arg("horizon"), py::arg("seed"));

  m.def("diffusion_qv", [](const PyTrajectory& p, double delta, double time_scale) {
    const int first[] = {0};
    return diffusion_qv(rescale_time(discretize(p.traj, delta, first), time_scale));
  }, py::arg("trajectory"), py::arg("delta"), py::arg("time_scale") = 1.0);

  m.def("omega_closed_form", &omega_closed_form, py::arg("theta"));
  m.def("conserved_h", [](double y1, double v1, double kappa) { return conserved_H({y1, v1, kappa}); },
        py::arg("y1"), py::arg("v1"), py::arg("kappa"));
  m.def(
      "fluid_integrate",
      [](double y1, double v1, double kappa, double horizon, double step) {
        const auto path = fluid_integrate({y1, v1, kappa}, horizon, step);
        Matrix out(path.size(), 2);
        for (std::size_t i = 0; i < path.size(); ++i) out.row(i) << path[i].y1, path[i].v1;
        return out;
      },
      py::arg("y1"), py::arg("v1"), py::arg("kappa"), py::arg("horizon"), py::arg("step"));
  m.def("c_coeff", [](double alpha, double beta) {
    const CCoefficient c = c_coeff(alpha, beta);
    return py::dict(py::arg("full_line") = c.full_line, py::arg("positive_part") = c.positive_part);
  }, py::arg("alpha"), py::arg("beta"));
  m.def("zz_expected_jumps", &zz_expected_jumps, py::arg("target"), py::arg("horizon"));
  m.def("zz_jump_limit", &zz_jump_limit, py::arg("target"), py::arg("horizon"));

  m.def("subcommands", &subcommands);
  m.def(
      "run_experiment",
      [](const std::string& subcommand, const std::string& overrides_json) {
        nlohmann::json doc = default_config(subcommand);
        doc.merge_patch(nlohmann::json::parse(overrides_json));
        std::ostringstream log;
        const int rc = run(subcommand, parse_config(doc), log);
        return py::make_tuple(rc, log.str());
      },
      py::arg("subcommand"), py::arg("overrides_json") = "{}");
}
