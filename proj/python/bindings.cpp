#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "noether/bargmann.hpp"
#include "noether/hamiltonian.hpp"
#include "noether/scenario.hpp"
#include "noether/virial.hpp"

namespace py = pybind11;
using namespace noether;

namespace {

Matrix stack(const Trajectory& traj, bool velocities) {
  Matrix out(static_cast<Eigen::Index>(traj.samples.size()), traj.dim());
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = (velocities ? traj.samples[i].qdot : traj.samples[i].q).transpose();
  }
  return out;
}

template <class F>
Vector column(const Trajectory& traj, F get) {
  Vector out(static_cast<Eigen::Index>(traj.samples.size()));
  for (std::size_t i = 0; i < traj.samples.size(); ++i) out[static_cast<Eigen::Index>(i)] = get(traj.samples[i]);
  return out;
}

py::dict report_dict(const Report& r) { return py::module_::import("json").attr("loads")(r.to_json()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Generalized Noether charges for scaling symmetries";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<DomainError>(m, "DomainError", error);
  py::register_exception<UsageError>(m, "UsageError", error);
  py::register_exception<IntegrationError>(m, "IntegrationError", error);
  py::register_exception<ConfigError>(m, "ConfigError", error);

  py::class_<Potential>(m, "Potential")
      .def_static("zero", &Potential::zero)
      .def_static("kepler", &Potential::kepler, py::arg("alpha"))
      .def_static("inverse_square", &Potential::inverse_square, py::arg("beta"))
      .def_static("linear_force", &Potential::linear_force, py::arg("g"))
      .def_static("harmonic", &Potential::harmonic, py::arg("omega"))
      .def_static("saddle", &Potential::saddle, py::arg("omega"))
      .def_static(
          "custom",
          [](double degree, std::function<double(const Vector&)> v) {
            return Potential::custom_homogeneous(degree, std::move(v));
          },
          py::arg("degree"), py::arg("value"))
      .def_property_readonly("degree", &Potential::degree)
      .def("value", &Potential::value)
      .def("gradient", &Potential::gradient)
      .def("__repr__", [](const Potential& p) { return "Potential(" + p.descriptor() + ")"; });

  py::class_<DynamicalSystem>(m, "DynamicalSystem")
      .def(py::init<int, Potential>(), py::arg("n"), py::arg("potential"))
      .def(py::init<Matrix, Potential>(), py::arg("mass_matrix"), py::arg("potential"))
      .def_property_readonly("dim", &DynamicalSystem::dim)
      .def_property_readonly("mass_matrix", &DynamicalSystem::mass_matrix)
      .def_property_readonly("potential", &DynamicalSystem::potential)
      .def("lagrangian",
           [](const DynamicalSystem& s, const Vector& q, const Vector& qd) { return evaluate_lagrangian(s, {q, qd, 0.0}); })
      .def("hamiltonian", [](const DynamicalSystem& s, const Vector& q,
                             const Vector& qd) { return evaluate_hamiltonian(s, {q, qd, 0.0}); })
      .def("acceleration",
           [](const DynamicalSystem& s, const Vector& q) { return acceleration(s, {q, Vector::Zero(q.size()), 0.0}); });

  py::class_<ScalingLaw>(m, "ScalingLaw")
      .def(py::init(&ScalingLaw::from_exponents), py::arg("a"), py::arg("b"), py::arg("c"))
      .def_readonly("a", &ScalingLaw::a)
      .def_readonly("b", &ScalingLaw::b)
      .def_readonly("c", &ScalingLaw::c)
      .def_readonly("k", &ScalingLaw::k)
      .def("__repr__", [](const ScalingLaw& l) {
        return "ScalingLaw(a=" + py::repr(py::float_(l.a)).cast<std::string>() +
               ", b=" + py::repr(py::float_(l.b)).cast<std::string>() +
               ", c=" + py::repr(py::float_(l.c)).cast<std::string>() + ")";
      });
  m.def("solve_exponents", &solve_exponents, py::arg("k"), py::arg("a") = 1.0);

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("system", [](const Trajectory& t) { return t.system; })
      .def_property_readonly("t", [](const Trajectory& t) { return column(t, [](const auto& s) { return s.t; }); })
      .def_property_readonly("q", [](const Trajectory& t) { return stack(t, false); })
      .def_property_readonly("qdot", [](const Trajectory& t) { return stack(t, true); })
      .def_property_readonly("action",
                             [](const Trajectory& t) { return column(t, [](const auto& s) { return s.action; }); })
      .def("sample", [](const Trajectory& t, double time) {
        const auto v = sample_at(t, time);
        return py::make_tuple(v.q, v.qdot, v.action);
      });

  m.def(
      "integrate",
      [](const DynamicalSystem& sys, const Vector& q0, const Vector& qdot0, double t_end, double tol,
         std::size_t grid_intervals) {
        IntegrateOptions opt;
        opt.tol = tol;
        opt.grid_intervals = grid_intervals;
        return integrate_trajectory(sys, {q0, qdot0, 0.0}, t_end, opt);
      },
      py::arg("system"), py::arg("q0"), py::arg("qdot0"), py::arg("t_end"), py::arg("tol") = kDefaultTolerance,
      py::arg("grid_intervals") = kDefaultGridIntervals);
  m.def("detect_period", &detect_period, py::arg("trajectory"), py::arg("tol_period") = 1e-6);
  m.def("apply_scaling", &apply_scaling, py::arg("trajectory"), py::arg("law"), py::arg("lam"));
  m.def("eom_residual", [](const Trajectory& t) { return eom_residual(t.system, t); });

  py::class_<ChargeSeries>(m, "ChargeSeries")
      .def_readonly("t", &ChargeSeries::t)
      .def_readonly("Q", &ChargeSeries::Q)
      .def_readonly("Q0", &ChargeSeries::Q0)
      .def_readonly("drift_abs", &ChargeSeries::drift_abs)
      .def_readonly("drift_rel", &ChargeSeries::drift_rel);
  m.def("noether_charge", [](const ScalingLaw& law, const Trajectory& t) {
    return noether_charge_series(t.system, law, t);
  });
  m.def("kv_split_charge", [](const ScalingLaw& law, const Trajectory& t) {
    return kv_split_charge(t.system, law, t).series;
  });
  m.def("free_dilation_charge", &free_dilation_charge, py::arg("trajectory"), py::arg("a") = 1.0);

  py::class_<VirialReport>(m, "VirialReport")
      .def_readonly("T", &VirialReport::T)
      .def_readonly("avg_K", &VirialReport::avg_K)
      .def_readonly("avg_V", &VirialReport::avg_V)
      .def_readonly("ratio", &VirialReport::ratio)
      .def_readonly("defect", &VirialReport::defect)
      .def_readonly("passed", &VirialReport::pass);
  m.def("virial_check", [](const Trajectory& t, double tol) { return periodic_virial_check(t, tol); },
        py::arg("trajectory"), py::arg("tol") = 1e-5);

  m.def(
      "generator_residual",
      [](const DynamicalSystem& sys, const ScalingLaw& law, const Vector& q, const Vector& p, double t) {
        return generator_residual(sys, law, {q, p, t});
      },
      py::arg("system"), py::arg("law"), py::arg("q"), py::arg("p"), py::arg("t") = 0.0);

  py::class_<PPWaveProfile>(m, "PPWaveProfile")
      .def_static("brdicka", &PPWaveProfile::brdicka, py::arg("omega"))
      .def_static("isotropic_oscillator", &PPWaveProfile::isotropic_oscillator, py::arg("omega"))
      .def("K", &PPWaveProfile::K, py::arg("t") = 0.0)
      .def_property_readonly("is_vacuum", [](const PPWaveProfile& p) { return p.is_vacuum(); });

  py::class_<BargmannMetric>(m, "BargmannMetric")
      .def_static("from_system", &BargmannMetric::from_system)
      .def_static("from_profile", &BargmannMetric::from_profile)
      .def_static("flat", &BargmannMetric::flat)
      .def_property_readonly("dim", &BargmannMetric::dim)
      .def("components", &BargmannMetric::components);

  py::class_<ConformalVector>(m, "ConformalVector")
      .def_static("scaling", &ConformalVector::scaling, py::arg("n"), py::arg("a"), py::arg("b"))
      .def_static("kepler", &ConformalVector::kepler, py::arg("n"))
      .def_static("homothety", &ConformalVector::homothety, py::arg("n"))
      .def_readonly("name", &ConformalVector::name);

  m.def(
      "lie_derivative",
      [](const BargmannMetric& g, const ConformalVector& y, const Vector& event) {
        const auto r = lie_derivative_metric(g, y, event);
        return py::make_tuple(r.two_chi, r.defect);
      },
      py::arg("metric"), py::arg("vector"), py::arg("event"));
  m.def("chrono_projective_check", &chrono_projective_check);
  m.def(
      "lift_null_residual",
      [](const Trajectory& t, double s0) {
        return null_residual(BargmannMetric::from_system(t.system), lift_trajectory(t, s0));
      },
      py::arg("trajectory"), py::arg("s0") = 0.0);
  m.def(
      "upstairs_geodesic",
      [](const BargmannMetric& g, double t0, const Vector& q0, double s0, const Vector& u, double t_end, double tol,
         std::size_t grid_intervals) {
        GeodesicOptions opt;
        opt.tol = tol;
        opt.grid_intervals = grid_intervals;
        const auto wl = upstairs_geodesic(g, make_event(t0, q0, s0), u, t_end, opt);
        Vector t(static_cast<Eigen::Index>(wl.samples.size()));
        Vector s(t.size());
        Matrix q(t.size(), g.transverse_dim());
        for (Eigen::Index i = 0; i < t.size(); ++i) {
          const auto& w = wl.samples[static_cast<std::size_t>(i)];
          t[i] = w.t;
          s[i] = w.s;
          q.row(i) = w.q.transpose();
        }
        return py::make_tuple(t, q, s);
      },
      py::arg("metric"), py::arg("t0"), py::arg("q0"), py::arg("s0"), py::arg("tangent"), py::arg("t_end"),
      py::arg("tol") = kDefaultTolerance, py::arg("grid_intervals") = kDefaultGridIntervals);

  m.def("list_builtins", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& b : list_builtin_scenarios()) out.emplace_back(b.name, b.description);
    return out;
  });
  m.def(
      "run_builtin",
      [](const std::string& name, const std::string& output_dir) {
        auto sc = builtin_scenario(name);
        sc.output_dir = output_dir;
        Report r;
        {
          py::gil_scoped_release release;
          r = run_scenario(sc);
        }
        return report_dict(r);
      },
      py::arg("name"), py::arg("output_dir"));
  m.def(
      "run_config",
      [](const std::string& path, const std::string& output_dir) {
        auto sc = load_scenario(path);
        sc.output_dir = output_dir;
        Report r;
        {
          py::gil_scoped_release release;
          r = run_scenario(sc);
        }
        return report_dict(r);
      },
      py::arg("path"), py::arg("output_dir"));
}
