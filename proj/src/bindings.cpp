/*
 * Copyright 2026 The hestonpde Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hestonpde/evolution.hpp"
#include "hestonpde/oracle.hpp"
#include "hestonpde/pricing.hpp"

namespace py = pybind11;
using namespace heston;

namespace {

py::dict json_to_dict(const nlohmann::json& j) {
    py::module_ json = py::module_::import("json");
    return json.attr("loads")(j.dump());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Weighted spectral-Galerkin solver for the Heston pricing PDE";

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double r, double q, double kappa, double theta,
                         double sigma, double rho, double lambda, double strike,
                         double maturity) {
                 ModelParams p{r, q, kappa, theta, sigma, rho, lambda, strike,
                               maturity};
                 p.check();
                 return p;
             }),
             py::arg("r") = 0.0, py::arg("q") = 0.0, py::arg("kappa") = 1.0,
             py::arg("theta") = 0.04, py::arg("sigma") = 0.3,
             py::arg("rho") = -0.5, py::arg("lambda_") = 0.0,
             py::arg("strike") = 100.0, py::arg("maturity") = 1.0)
        .def_readonly("r", &ModelParams::r)
        .def_readonly("q", &ModelParams::q)
        .def_readonly("kappa", &ModelParams::kappa)
        .def_readonly("theta", &ModelParams::theta)
        .def_readonly("sigma", &ModelParams::sigma)
        .def_readonly("rho", &ModelParams::rho)
        .def_readonly("strike", &ModelParams::strike)
        .def_readonly("maturity", &ModelParams::maturity);

    py::class_<TransformedParams>(m, "TransformedParams")
        .def_readonly("kappa_star", &TransformedParams::kappa_star)
        .def_readonly("theta_star", &TransformedParams::theta_star)
        .def_readonly("theta_sigma", &TransformedParams::theta_sigma)
        .def_readonly("q_r", &TransformedParams::q_r)
        .def_readonly("sigma", &TransformedParams::sigma)
        .def_readonly("rho", &TransformedParams::rho);

    py::class_<WeightParams>(m, "WeightParams")
        .def(py::init<double, double, double>(), py::arg("beta"),
             py::arg("gamma"), py::arg("mu"))
        .def_readonly("beta", &WeightParams::beta)
        .def_readonly("gamma", &WeightParams::gamma)
        .def_readonly("mu", &WeightParams::mu);

    py::class_<CoercivityConstants>(m, "CoercivityConstants")
        .def_readonly("c1", &CoercivityConstants::c1)
        .def_readonly("c2", &CoercivityConstants::c2)
        .def_readonly("c3", &CoercivityConstants::c3)
        .def_readonly("c1_prime", &CoercivityConstants::c1_prime)
        .def_readonly("c2_prime", &CoercivityConstants::c2_prime)
        .def_readonly("m1", &CoercivityConstants::m1);

    py::class_<AdmissibilityReport>(m, "AdmissibilityReport")
        .def_readonly("admissible", &AdmissibilityReport::admissible)
        .def_readonly("weight", &AdmissibilityReport::weight)
        .def_readonly("constants", &AdmissibilityReport::constants)
        .def_readonly("beta_max", &AdmissibilityReport::beta_max)
        .def_readonly("kappa_threshold", &AdmissibilityReport::kappa_threshold)
        .def_readonly("feller_slack", &AdmissibilityReport::feller_slack)
        .def("to_dict",
             [](const AdmissibilityReport& r) { return json_to_dict(r.to_json()); });

    m.def("transform", &transform, py::arg("model"));
    m.def("validate", &validate, py::arg("transformed"), py::arg("gamma"),
          py::arg("beta_override") = std::nullopt);
    m.def("coercivity_constants", &coercivity_constants);

    py::class_<QuadratureGrid>(m, "QuadratureGrid")
        .def_static("for_weight", &QuadratureGrid::for_weight, py::arg("weight"),
                    py::arg("m_max"), py::arg("n_max"))
        .def_static("for_plain_l2", &QuadratureGrid::for_plain_l2,
                    py::arg("m_max"), py::arg("n_max"))
        .def_property_readonly("x_max", &QuadratureGrid::x_max)
        .def_property_readonly("xi_max", &QuadratureGrid::xi_max);

    m.def("weight_eval", &weight_eval, py::arg("x"), py::arg("xi"), py::arg("w"));

    py::class_<TensorBasis>(m, "TensorBasis")
        .def(py::init<int, int>(), py::arg("m_max"), py::arg("n_max"))
        .def_property_readonly("m_max", &TensorBasis::m_max)
        .def_property_readonly("n_max", &TensorBasis::n_max)
        .def("eval",
             [](const TensorBasis& b, int mm, int nn, double x, double xi) {
                 return b.eval(mm, nn, x, xi);
             });

    py::class_<CoefficientVector>(m, "CoefficientVector")
        .def(py::init<int, int>())
        .def_readonly("m_max", &CoefficientVector::m_max)
        .def_readonly("n_max", &CoefficientVector::n_max)
        .def_property(
            "c", [](const CoefficientVector& v) { return v.c; },
            [](CoefficientVector& v, const Eigen::VectorXcd& c) { v.c = c; })
        .def("save_csv", &CoefficientVector::save_csv)
        .def_static("load_csv", &CoefficientVector::load_csv);

    py::class_<ProjectionResult>(m, "ProjectionResult")
        .def_readonly("coeffs", &ProjectionResult::coeffs)
        .def_readonly("residual", &ProjectionResult::residual)
        .def_readonly("input_norm", &ProjectionResult::input_norm)
        .def_readonly("rank_x", &ProjectionResult::rank_x)
        .def_readonly("rank_xi", &ProjectionResult::rank_xi);

    py::class_<Payoff>(m, "Payoff")
        .def_static("call", &Payoff::call)
        .def_static("put", &Payoff::put)
        .def("__call__", &Payoff::operator());

    m.def("project_payoff", &project_payoff, py::arg("payoff"), py::arg("basis"),
          py::arg("grid"), py::arg("weight"));
    m.def(
        "eval_sum",
        [](const CoefficientVector& c, const TensorBasis& b, Complex z,
           Complex zeta) { return eval_sum(c, b, z, zeta); },
        py::arg("coeffs"), py::arg("basis"), py::arg("z"), py::arg("zeta"));

    py::class_<ShiftParams>(m, "ShiftParams")
        .def(py::init([](double y, double omega, Complex omega_star) {
                 ShiftParams s{y, omega, omega_star};
                 s.check();
                 return s;
             }),
             py::arg("y") = 0.0, py::arg("omega") = 0.0,
             py::arg("omega_star") = Complex(0.0, 0.0));

    py::class_<OperatorMatrices>(m, "OperatorMatrices")
        .def_readonly("M", &OperatorMatrices::M)
        .def_readonly("S", &OperatorMatrices::S)
        .def_readonly("A", &OperatorMatrices::A)
        .def("shifted", &OperatorMatrices::shifted);

    m.def("assemble", &assemble, py::arg("basis"), py::arg("grid"),
          py::arg("transformed"), py::arg("weight"));

    py::class_<CertReport>(m, "CertReport")
        .def_readonly("trials", &CertReport::trials)
        .def_readonly("worst_slack_rel", &CertReport::worst_slack_rel)
        .def_readonly("max_ratio", &CertReport::max_ratio)
        .def_readonly("bound", &CertReport::bound)
        .def_readonly("pass_", &CertReport::pass)
        .def("to_dict",
             [](const CertReport& r) { return json_to_dict(r.to_json()); });

    m.def("certify_garding", &certify_garding, py::arg("mats"),
          py::arg("constants"), py::arg("trials") = 500,
          py::arg("omegas") = std::vector<double>{},
          py::arg("seed") = 20260809u);
    m.def("certify_bounded", &certify_bounded, py::arg("mats"),
          py::arg("constants"), py::arg("trials") = 500,
          py::arg("seed") = 20260809u);

    py::class_<SolveConfig>(m, "SolveConfig")
        .def(py::init([](double dt, double theta, double t_end,
                         std::vector<double> snaps) {
                 SolveConfig c;
                 c.dt = dt;
                 c.theta_scheme = theta;
                 c.t_end = t_end;
                 c.snapshot_times = std::move(snaps);
                 c.check();
                 return c;
             }),
             py::arg("dt") = 1e-3, py::arg("theta_scheme") = 1.0,
             py::arg("t_end") = 0.5,
             py::arg("snapshot_times") = std::vector<double>{});

    py::class_<PathParams>(m, "PathParams")
        .def(py::init([](double y0, double omega0, double phi, double t_prime,
                         double kappa0, double nu0) {
                 PathParams p{y0, omega0, phi, t_prime, kappa0, nu0};
                 p.check();
                 return p;
             }),
             py::arg("y0") = 0.0, py::arg("omega0") = 0.0, py::arg("phi") = 0.0,
             py::arg("t_prime") = 0.25, py::arg("kappa0") = 0.1,
             py::arg("nu0") = 10.0);

    py::class_<StepRecord>(m, "StepRecord")
        .def_readonly("t", &StepRecord::t)
        .def_readonly("h_norm", &StepRecord::h_norm)
        .def_readonly("v_norm", &StepRecord::v_norm)
        .def_readonly("envelope", &StepRecord::envelope)
        .def_readonly("violated", &StepRecord::violated);

    py::class_<TrajectoryReport>(m, "TrajectoryReport")
        .def_readonly("steps", &TrajectoryReport::steps)
        .def_readonly("envelope_ok", &TrajectoryReport::envelope_ok)
        .def_readonly("max_excess", &TrajectoryReport::max_excess)
        .def("save_csv", &TrajectoryReport::save_csv);

    py::class_<EvolveResult>(m, "EvolveResult")
        .def_readonly("traj", &EvolveResult::traj)
        .def_readonly("final_state", &EvolveResult::final_state);

    m.def("evolve", &evolve, py::arg("mats"), py::arg("c0"), py::arg("config"));
    m.def("evolve_shifted", &evolve_shifted, py::arg("mats"), py::arg("c0"),
          py::arg("shift"), py::arg("config"), py::arg("grid"));
    m.def("evolve_along_path", &evolve_along_path, py::arg("mats"), py::arg("c0"),
          py::arg("path"), py::arg("config"), py::arg("weak_l3") = false);
    m.def("in_gamma", &in_gamma, py::arg("y"), py::arg("omega"), py::arg("alpha"),
          py::arg("tau"), py::arg("path"));

    py::class_<PriceSurface>(m, "PriceSurface")
        .def_readonly("x", &PriceSurface::x)
        .def_readonly("v", &PriceSurface::v)
        .def_readonly("value", &PriceSurface::value)
        .def_readonly("du_dxi", &PriceSurface::du_dxi)
        .def_readonly("time_to_maturity", &PriceSurface::time_to_maturity)
        .def("save_csv", &PriceSurface::save_csv);

    m.def("price_surface", &price_surface, py::arg("state"), py::arg("basis"),
          py::arg("model"), py::arg("time_to_maturity"), py::arg("x_grid"),
          py::arg("v_grid"));

    py::class_<CompletenessReport>(m, "CompletenessReport")
        .def_readonly("pass_", &CompletenessReport::pass)
        .def("to_dict",
             [](const CompletenessReport& r) { return json_to_dict(r.to_json()); });
    m.def("completeness_report", &completeness_report, py::arg("surfaces"),
          py::arg("tolerance"));

    py::class_<McConfig>(m, "McConfig")
        .def(py::init([](std::int64_t paths, int steps, std::uint64_t seed,
                         bool antithetic, int threads) {
                 McConfig c;
                 c.paths = paths;
                 c.steps = steps;
                 c.seed = seed;
                 c.antithetic = antithetic;
                 c.threads = threads;
                 return c;
             }),
             py::arg("paths") = 100000, py::arg("steps") = 100,
             py::arg("seed") = 1234, py::arg("antithetic") = true,
             py::arg("threads") = 0);

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("price", &McEstimate::price)
        .def_readonly("std_error", &McEstimate::std_error)
        .def_readonly("paths", &McEstimate::paths);

    m.def("mc_price", &mc_price, py::arg("model"), py::arg("s0"), py::arg("v0"),
          py::arg("payoff"), py::arg("config"));
    m.def("closed_form_price", &closed_form_price, py::arg("model"),
          py::arg("s0"), py::arg("v0"), py::arg("call"));
    m.def("black_scholes_price", &black_scholes_price, py::arg("s0"),
          py::arg("strike"), py::arg("r"), py::arg("q"), py::arg("variance"),
          py::arg("maturity"), py::arg("call"));
}
