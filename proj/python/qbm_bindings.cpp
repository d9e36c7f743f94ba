#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qbm/errors.hpp"
#include "qbm/exact.hpp"
#include "qbm/inner.hpp"
#include "qbm/oracles.hpp"

namespace py = pybind11;
using namespace qbm;

PYBIND11_MODULE(_qbm, m) {
    m.doc() = "Quantum Brownian motion propagators and positivity diagnostics.";

    static py::exception<Error> base(m, "QbmError");
    static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
    static py::exception<NoViolationFound> noviol(m, "NoViolationFound", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config, e.what());
        } catch (const NoViolationFound& e) {
            py::set_error(noviol, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    py::class_<PhysParams>(m, "PhysParams")
        .def(py::init<>())
        .def_static("dimensionless", &PhysParams::dimensionless, py::arg("Gamma"), py::arg("alpha"),
                    py::arg("kT_over_hbar_omega"))
        .def_readwrite("m", &PhysParams::m)
        .def_readwrite("omega", &PhysParams::omega)
        .def_readwrite("Gamma", &PhysParams::Gamma)
        .def_readwrite("alpha", &PhysParams::alpha)
        .def_readwrite("T", &PhysParams::T)
        .def_readwrite("hbar", &PhysParams::hbar)
        .def_readwrite("kB", &PhysParams::kB)
        .def_property_readonly("kT", &PhysParams::kT)
        .def("validate", &PhysParams::validate)
        .def("__repr__", [](const PhysParams& p) { return "PhysParams(" + nlohmann::json(p).dump() + ")"; });

    py::class_<GaussianState>(m, "GaussianState")
        .def(py::init([](const Vec2& mean, const Mat2& cov) {
                 GaussianState s;
                 s.mean = mean;
                 s.cov = Covariance::from_matrix(cov);
                 return s;
             }),
             py::arg("mean"), py::arg("cov"))
        .def_static("vacuum", &GaussianState::vacuum)
        .def_static("squeezed", &GaussianState::squeezed, py::arg("p"), py::arg("squeeze"),
                    py::arg("angle") = 0.0, py::arg("mean") = Vec2::Zero())
        .def_readwrite("mean", &GaussianState::mean)
        .def_property_readonly("cov", [](const GaussianState& s) { return s.cov.matrix(); });

    py::class_<GaussianChannel>(m, "GaussianChannel")
        .def_readwrite("trans", &GaussianChannel::trans)
        .def_readwrite("noise", &GaussianChannel::noise)
        .def_readonly("cp_certified", &GaussianChannel::cp_certified);

    m.def("apply_channel", &apply_channel);
    m.def("physicality_deficit", &physicality_deficit);
    m.def("linear_entropy", &linear_entropy, py::arg("state"), py::arg("p"), py::arg("tol") = 1e-10);
    m.def("is_completely_positive", &is_completely_positive, py::arg("channel"), py::arg("p"),
          py::arg("tol") = 1e-12);

    m.def("exact_channel", [](const PhysParams& p, double t) { return exact_channel(p, t); });
    m.def("inner_channel", &inner_channel);
    m.def("outer_channel", &outer_channel, py::arg("p"), py::arg("t"), py::arg("gao") = false);
    m.def("patched_channel",
          [](const PhysParams& p, double dt, double t, bool gao) { return patched_channel(p, dt, t, gao).channel; },
          py::arg("p"), py::arg("dt"), py::arg("t"), py::arg("gao") = false);

    m.def("coherent_entropy", &coherent_entropy);
    m.def("uncertainty_floors", [](const PhysParams& p, double dt) {
        const UncertaintyFloors f = uncertainty_floors(p, dt);
        return py::dict(py::arg("dq2") = f.dq2, py::arg("dp2") = f.dp2);
    });
    m.def("inner_lambdas", [](const PhysParams& p, double t) {
        const InnerLambdas l = inner_lambdas(p, InnerParams::at(p, t));
        return py::make_tuple(l.lamPlus, l.lamMinus);
    });

    m.def("condition_28", [](const PhysParams& p, double t1) { return condition_28(p, t1); });
    m.def("minimal_patch_time", [](const PhysParams& p) { return minimal_patch_time(p); });
    m.def("condition_27", [](const PhysParams& p, double t1, double t2) { return condition_27(p, t1, t2).holds; });
    m.def("wei_norman_factors", [](const PhysParams& p, double t1, double t2) {
        const WeiNormanFactors w = wei_norman_factors(p, t1, t2);
        return py::dict(py::arg("lam") = w.lam, py::arg("lam_plus") = w.lamPlus,
                        py::arg("lam_minus") = w.lamMinus, py::arg("s1") = w.s1);
    });

    m.def("demo_violation", [](const PhysParams& p, int dim) {
        const ViolationCertificate c = demo_violation(p, dim);
        return py::dict(py::arg("squeeze") = c.squeeze, py::arg("t") = c.t, py::arg("min_eig") = c.min_eig,
                        py::arg("gaussian_deficit") = c.gaussian_deficit);
    }, py::arg("p"), py::arg("dim") = 40);
    m.def("algebra_residual", [](const PhysParams& p, int dim) { return verify_algebra_table(p, dim).max_residual; });
}
