// Python bindings for the main operations: curve construction, bicycle
// integration, monodromy analysis, correspondence, symbolic integrands, and
// the AKNS/Wegner checks.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bikegeo/correspondence.hpp"
#include "bikegeo/diffpoly.hpp"
#include "bikegeo/integrable.hpp"

namespace py = pybind11;
using namespace bikegeo;

namespace {

Curve make_curve(const std::string& id, const std::map<std::string, double>& params,
                 int samples) {
  CurveSpec spec;
  spec.id = id;
  spec.param = params;
  return build_curve(spec, samples);
}

}  // namespace

PYBIND11_MODULE(_bikegeo, m) {
  m.doc() = "bicycle kinematics, Moebius monodromy, and filament hierarchy";

  py::class_<Curve>(m, "Curve")
      .def_readonly("dimension", &Curve::dimension)
      .def_readonly("closed", &Curve::closed)
      .def_readonly("period", &Curve::period)
      .def_readonly("analytic_id", &Curve::analytic_id)
      .def_property_readonly("params", [](const Curve& c) { return c.params; })
      .def_property_readonly("points", [](const Curve& c) { return c.points; })
      .def("position", &Curve::position)
      .def("velocity", &Curve::velocity)
      .def("length", &Curve::length);

  m.def("build_curve", &make_curve, py::arg("id"), py::arg("params"), py::arg("samples"),
        "construct an analytic track: line, circle_multi, gamma_kn");
  m.def("resample_arclength", &resample_arclength);
  m.def("signed_planar_area", &signed_planar_area);
  m.def("ell_kn", &ell_kn);

  py::class_<BikeTrajectory>(m, "BikeTrajectory")
      .def_readonly("ell", &BikeTrajectory::ell)
      .def_readonly("t", &BikeTrajectory::t)
      .def_readonly("r", &BikeTrajectory::r)
      .def_readonly("rear", &BikeTrajectory::rear)
      .def_readonly("norm_drift", &BikeTrajectory::norm_drift);
  m.def("integrate_bicycle_sphere", &integrate_bicycle_sphere, py::arg("front"),
        py::arg("ell"), py::arg("r0"), py::arg("t0"), py::arg("t1"), py::arg("steps") = 0);

  py::class_<LorentzMatrix>(m, "LorentzMatrix")
      .def_readonly("n", &LorentzMatrix::n)
      .def_readonly("ell", &LorentzMatrix::ell)
      .def_property_readonly("matrix", [](const LorentzMatrix& lm) { return lm.m; })
      .def("j_residual", &LorentzMatrix::j_residual)
      .def("act", &LorentzMatrix::act, py::arg("r"), py::arg("renormalize") = true);
  m.def("lorentz_lift_monodromy", &lorentz_lift_monodromy, py::arg("front"),
        py::arg("ell"), py::arg("t0"), py::arg("t1"), py::arg("steps") = 0);

  py::enum_<MonodromyClass>(m, "MonodromyClass")
      .value("hyperbolic", MonodromyClass::Hyperbolic)
      .value("parabolic", MonodromyClass::Parabolic)
      .value("elliptic", MonodromyClass::Elliptic)
      .value("trivial", MonodromyClass::Trivial);

  py::class_<FixedPoint>(m, "FixedPoint")
      .def_readonly("r", &FixedPoint::r)
      .def_readonly("derivative", &FixedPoint::derivative)
      .def_readonly("attracting", &FixedPoint::attracting);

  py::class_<MonodromyElement>(m, "MonodromyElement")
      .def_readonly("n", &MonodromyElement::n)
      .def_readonly("ell", &MonodromyElement::ell)
      .def_property_readonly("sl2c", [](const MonodromyElement& e) { return e.sl2c; })
      .def_property_readonly("sl2r", [](const MonodromyElement& e) { return e.sl2r; })
      .def("trace", &MonodromyElement::trace)
      .def("sphere_apply", &MonodromyElement::sphere_apply);
  m.def("moebius_from_lorentz", &moebius_from_lorentz);
  m.def("classify",
        [](const MonodromyElement& e) { return classify(e, nullptr); });
  m.def("fixed_points", &fixed_points);
  m.def("derivative_at_fixed_point", &derivative_at_fixed_point);

  py::class_<BerryReport>(m, "BerryReport")
      .def_readonly("m_prime", &BerryReport::m_prime)
      .def_readonly("rear_length", &BerryReport::rear_length)
      .def_readonly("berry_area", &BerryReport::berry_area)
      .def_readonly("residual", &BerryReport::residual)
      .def_readonly("fd_residual", &BerryReport::fd_residual);
  m.def("berry_check", &berry_check, py::arg("front"), py::arg("ell"),
        py::arg("steps") = 0);

  py::class_<AreaBivector>(m, "AreaBivector")
      .def_readonly("matrix", &AreaBivector::matrix)
      .def_readonly("axial", &AreaBivector::axial);
  py::class_<PlanimeterReport>(m, "PlanimeterReport")
      .def_readonly("area", &PlanimeterReport::area)
      .def_readonly("eps", &PlanimeterReport::eps)
      .def_readonly("error", &PlanimeterReport::error)
      .def_readonly("slope", &PlanimeterReport::slope);
  m.def("planimeter_check", &planimeter_check);
  m.def("klein_distance", &klein_distance);

  py::class_<CorrespondenceResidual>(m, "CorrespondenceResidual")
      .def_readonly("chord_dev", &CorrespondenceResidual::chord_dev)
      .def_readonly("tangency_res", &CorrespondenceResidual::tangency_res)
      .def_readonly("glide_res", &CorrespondenceResidual::glide_res);
  m.def("bicycle_partner", &bicycle_partner, py::arg("front"), py::arg("ell"),
        py::arg("r0"), py::arg("steps") = 0);
  m.def("verify_correspondence", &verify_correspondence);
  m.def("gamma_kn", &gamma_kn);
  m.def("rotation_numbers", &rotation_numbers);

  py::class_<ZindlerCertificate>(m, "ZindlerCertificate")
      .def_readonly("rotation_number", &ZindlerCertificate::rotation_number)
      .def_readonly("chord_length", &ZindlerCertificate::chord_length)
      .def_readonly("chord_dev", &ZindlerCertificate::chord_dev)
      .def_readonly("tangency_res", &ZindlerCertificate::tangency_res)
      .def_readonly("passed", &ZindlerCertificate::pass);
  m.def("zindler_verify", &zindler_verify, py::arg("curve"), py::arg("rho"),
        py::arg("tol_scale") = 1e-6);

  m.def("zn_series_str", [](int N) {
    std::vector<std::string> out;
    for (const auto& z : diffpoly::zn_series(N)) out.push_back(z.str());
    return out;
  });
  m.def("monodromy_integrands_str", [](int N) {
    std::vector<std::string> out;
    for (const auto& mi : diffpoly::monodromy_integrands(N))
      out.push_back(mi.canonical.str());
    return out;
  });
  m.def("evaluate_integrand_on_circle", [](int n, int samples) {
    CurveSpec spec;
    spec.id = "circle_multi";
    Curve c = build_curve(spec, samples);
    auto I = diffpoly::monodromy_integrands(n);
    return diffpoly::evaluate_on_curve(I[n].canonical, frenet_data(c), true);
  });

  m.def("ell_log_multiplier",
        [](const Curve& front, double ell) { return ell_log_multiplier(front, ell); });

  py::class_<DarbouxBikeReport>(m, "DarbouxBikeReport")
      .def_readonly("chord", &DarbouxBikeReport::chord)
      .def_readonly("correspondence", &DarbouxBikeReport::correspondence);
  m.def("darboux_bike_check_helix",
        [](double amp, double rate, double eps, int steps) {
          CFn q = [=](double t) { return amp * std::exp(cd(0.0, rate * t)); };
          AknsFrame fr = akns_integrate(q, 0.0, 0.0, 4.0 * kPi, steps);
          return darboux_bike_check(fr, eps, Eigen::Vector2cd(1.0, 0.4));
        },
        py::arg("amp") = 0.5, py::arg("rate") = 0.3, py::arg("eps") = 1.0,
        py::arg("steps") = 4096);

  m.def("buckled_ring_residual", &buckled_ring_residual);
  m.def("wegner_closed_ring", [](double a, double r_max, int lobes, int winding,
                                 int samples) {
    WegnerParams params;
    Curve ring = wegner_closed_ring(a, r_max, lobes, winding, samples, &params);
    return py::make_tuple(ring, params.lambda_el(), params.mu_el());
  });
}
