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

// End-to-end acceptance suite.  One line per criterion; exit code equals the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hestonpde/evolution.hpp"
#include "hestonpde/oracle.hpp"
#include "hestonpde/pricing.hpp"

using namespace heston;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name,
               const std::function<bool(std::string&)>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] criterion %d (%s): %s  [%.1fs]\n", ok ? "PASS" : "FAIL",
                number, name.c_str(), detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

TransformedParams reference_set() {
    TransformedParams t;
    t.kappa_star = 3.5;
    t.theta_star = 0.6;
    t.theta_sigma = 0.6;
    t.sigma = 1.0;
    t.rho = -0.5;
    t.q_r = 0.0;
    return t;
}

ModelParams benchmark_model() {
    ModelParams m;
    m.kappa = 2.0;
    m.theta = 0.04;
    m.sigma = 0.3;
    m.rho = -0.5;
    m.r = 0.0;
    m.q = 0.0;
    m.strike = 100.0;
    m.maturity = 0.5;
    return m;
}

constexpr double kBenchS0 = 100.0;
constexpr double kBenchV0 = 0.04;
// gamma for the put benchmark runs: large enough to localize the weighted
// norm near the strike (user-overridable weight choice; admissible here)
constexpr double kPutGamma = 2.75;

struct PutRun {
    double price = 0.0;
    EvolveResult result;
    CoercivityConstants constants;
};

PutRun run_put(int order, double dt, double t_end,
               std::vector<double> snapshots = {}) {
    const ModelParams m = benchmark_model();
    const auto t = transform(m);
    const auto rep = validate(t, kPutGamma);
    if (!rep.admissible) throw std::runtime_error("put benchmark inadmissible");
    const TensorBasis basis(order, order);
    const auto grid = QuadratureGrid::for_weight(rep.weight, order, order);
    const auto mats = assemble(basis, grid, t, rep.weight);
    const auto pr = project_payoff(Payoff::put(m.strike), basis, grid, rep.weight);
    SolveConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.snapshot_times = std::move(snapshots);
    PutRun out{0.0, evolve(mats, pr.coeffs, cfg), rep.constants};
    out.price = std::exp(-m.r * t_end) *
                eval_sum(out.result.final_state, basis,
                         std::log(kBenchS0 / m.strike), kBenchV0 / m.sigma)
                    .real();
    return out;
}

struct Fam {
    std::string name;
    WeightedFunction f;
};

std::vector<Fam> twenty_function_family() {
    std::vector<Fam> fam;
    auto gauss = [&](double a, double b) {
        WeightedFunction f;
        f.value = [a, b](double x, double xi) {
            return Complex(std::exp(-a * x * x - b * xi), 0.0);
        };
        f.dx = [a, b](double x, double xi) {
            return Complex(-2.0 * a * x * std::exp(-a * x * x - b * xi), 0.0);
        };
        f.dxi = [a, b](double x, double xi) {
            return Complex(-b * std::exp(-a * x * x - b * xi), 0.0);
        };
        fam.push_back({"gauss(" + std::to_string(a) + "," + std::to_string(b) + ")", f});
    };
    auto poly_gauss = [&](int p, int q) {
        WeightedFunction f;
        f.value = [p, q](double x, double xi) {
            return Complex(std::pow(x, p) * std::pow(xi, q) *
                               std::exp(-x * x - xi),
                           0.0);
        };
        f.dx = [p, q](double x, double xi) {
            const double base = std::pow(xi, q) * std::exp(-x * x - xi);
            const double dp = p == 0 ? 0.0 : p * std::pow(x, p - 1);
            return Complex((dp - 2.0 * x * std::pow(x, p)) * base, 0.0);
        };
        f.dxi = [p, q](double x, double xi) {
            const double base = std::pow(x, p) * std::exp(-x * x - xi);
            const double dq = q == 0 ? 0.0 : q * std::pow(xi, q - 1);
            return Complex((dq - std::pow(xi, q)) * base, 0.0);
        };
        fam.push_back({"poly(" + std::to_string(p) + "," + std::to_string(q) + ")", f});
    };
    auto exp_exp = [&](double c, double d) {
        WeightedFunction f;
        f.value = [c, d](double x, double xi) {
            return Complex(std::exp(-c * std::abs(x) - d * xi), 0.0);
        };
        f.dx = [c, d](double x, double xi) {
            const double s = x > 0 ? 1.0 : -1.0;
            return Complex(-c * s * std::exp(-c * std::abs(x) - d * xi), 0.0);
        };
        f.dxi = [c, d](double x, double xi) {
            return Complex(-d * std::exp(-c * std::abs(x) - d * xi), 0.0);
        };
        fam.push_back({"exp(" + std::to_string(c) + "," + std::to_string(d) + ")", f});
    };
    exp_exp(1.0, 1.0); // the worked pair first
    gauss(0.3, 0.4);
    gauss(0.3, 0.9);
    gauss(0.7, 0.4);
    gauss(0.7, 0.9);
    gauss(1.2, 0.4);
    gauss(1.2, 0.9);
    for (int p : {0, 1, 2})
        for (int q : {0, 1}) poly_gauss(p, q);
    exp_exp(1.0, 0.7);
    exp_exp(2.0, 1.0);
    exp_exp(2.0, 0.7);
    // oscillatory-in-x entries round the family out to twenty
    for (double k : {1.0, 2.0, 3.0, 4.0}) {
        WeightedFunction f;
        f.value = [k](double x, double xi) {
            return Complex(std::cos(k * x) * std::exp(-x * x - xi), 0.0);
        };
        f.dx = [k](double x, double xi) {
            return Complex((-k * std::sin(k * x) - 2.0 * x * std::cos(k * x)) *
                               std::exp(-x * x - xi),
                           0.0);
        };
        f.dxi = [k](double x, double xi) {
            return Complex(-std::cos(k * x) * std::exp(-x * x - xi), 0.0);
        };
        fam.push_back({"cos(" + std::to_string(k) + ")gauss", f});
    }
    return fam;
}

} // namespace

int main() {
    criterion(1, "admissibility calculus", [](std::string& d) {
        const auto rep = validate(reference_set(), 2.0);
        const double kthr = 2.0 * 0.5 + std::sqrt(6.0);
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "feller=%.6g kappa_thr=%.10g mu=%.6g beta_max=%.6g",
                      rep.feller_slack, rep.kappa_threshold, rep.weight.mu,
                      rep.beta_max);
        d = buf;
        return rep.admissible && std::abs(rep.feller_slack + 1.6) < 1e-12 &&
               std::abs(rep.kappa_threshold - kthr) < 1e-12 &&
               std::abs(rep.weight.mu - 2.5) < 1e-12 &&
               std::abs(rep.beta_max - 4.2) < 1e-12;
    });

    criterion(2, "appendix inequality suite", [](std::string& d) {
        const WeightParams w{2.0, 2.0, 2.5};
        const auto grid = QuadratureGrid::for_weight(w, 12, 12);
        const auto fam = twenty_function_family();
        if (fam.size() != 20) {
            d = "family size mismatch";
            return false;
        }
        bool ok = true;
        for (const auto& [name, f] : fam) {
            const auto h = check_hardy(f, grid, w);
            const auto s = check_sobolev(f, grid, w);
            const auto t = check_traces(f, grid, w);
            if (!(h.pass && s.pass && t.pass)) {
                ok = false;
                d += name + " failed; ";
            }
        }
        // worked values for u = e^{-|x|} e^{-xi}
        const auto h0 = check_hardy(fam[0].f, grid, w);
        const auto s0 = check_sobolev(fam[0].f, grid, w);
        const double i2 = 1.0 / 91.125;
        const double hardy_lhs = 1.0 / 9.0;
        const double hardy_rhs = 20.5 * i2;
        const double sob_lhs = i2;
        const double sob_rhs = 0.64 * i2 + 1.6 * 0.5 / 20.25;
        auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "20 functions; hardy %.6g/%.6g sobolev %.6g/%.6g",
                      h0.lhs, h0.rhs, s0.lhs, s0.rhs);
        d = std::string(buf) + " " + d;
        return ok && rel(h0.lhs, hardy_lhs) < 1e-6 && rel(h0.rhs, hardy_rhs) < 1e-6 &&
               rel(s0.lhs, sob_lhs) < 1e-6 && rel(s0.rhs, sob_rhs) < 1e-6;
    });

    criterion(3, "garding certification", [](std::string& d) {
        const auto t = reference_set();
        const auto rep = validate(t, 2.0);
        const TensorBasis basis(16, 16);
        const auto grid = QuadratureGrid::for_weight(rep.weight, 16, 16);
        const auto mats = assemble(basis, grid, t, rep.weight);
        const auto cert = certify_garding(mats, rep.constants, 500,
                                          {-0.1, -0.05, 0.05, 0.1});
        char buf[128];
        std::snprintf(buf, sizeof buf, "min relative slack %.3e (>= -1e-6)",
                      cert.worst_slack_rel);
        d = buf;
        return cert.pass;
    });

    criterion(4, "semigroup envelope (put)", [](std::string& d) {
        const auto run = run_put(32, 1e-3, 0.5);
        char buf[128];
        std::snprintf(buf, sizeof buf, "max envelope excess %.3e (<= 1e-6)",
                      run.result.traj.max_excess);
        d = buf;
        return run.result.traj.envelope_ok &&
               run.result.traj.max_excess <= 1e-6;
    });

    criterion(5, "analyticity estimate along paths", [](std::string& d) {
        const ModelParams m = benchmark_model();
        const auto t = transform(m);
        const auto rep = validate(t, kPutGamma);
        const TensorBasis basis(24, 24);
        const auto grid = QuadratureGrid::for_weight(rep.weight, 24, 24);
        const auto mats = assemble(basis, grid, t, rep.weight);
        const auto pr =
            project_payoff(Payoff::put(m.strike), basis, grid, rep.weight);
        const std::vector<std::array<double, 3>> triples = {
            {0.02, 0.02, 0.05},
            {-0.02, 0.015, -0.08},
            {0.024, -0.024, 0.09},
            {0.01, 0.0, 0.099},
            {0.0, 0.02, -0.05}};
        double worst = 0.0;
        for (const auto& [y0, om0, phi] : triples) {
            PathParams p;
            p.y0 = y0;
            p.omega0 = om0;
            p.phi = phi;
            p.t_prime = 0.25;
            p.kappa0 = 0.1;
            p.nu0 = 10.0;
            SolveConfig cfg;
            cfg.dt = 1e-3;
            cfg.t_end = 0.5;
            const auto res = evolve_along_path(mats, pr.coeffs, p, cfg);
            worst = std::max(worst, res.traj.max_excess);
            if (!res.traj.envelope_ok) {
                d = "envelope violated";
                return false;
            }
        }
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "5 admissible triples; worst excess %.3e", worst);
        d = buf;
        return true;
    });

    criterion(6, "oracle agreement (put benchmark)", [](std::string& d) {
        const ModelParams m = benchmark_model();
        const double cf = closed_form_price(m, kBenchS0, kBenchV0, false);
        const auto run32 = run_put(32, 1e-3, m.maturity);
        const auto run48 = run_put(48, 1e-3, m.maturity);
        const double e32 = std::abs(run32.price - cf) / cf;
        const double e48 = std::abs(run48.price - cf) / cf;
        McConfig mcc;
        mcc.paths = 1000000;
        mcc.steps = static_cast<int>(std::lround(200 * m.maturity));
        mcc.seed = 1234;
        const auto mc = mc_price(m, kBenchS0, kBenchV0, Payoff::put(m.strike), mcc);
        const double cf_mc_se = std::abs(cf - mc.price) / mc.std_error;
        const double pde_mc_se = std::abs(run48.price - mc.price) / mc.std_error;
        char buf[320];
        std::snprintf(buf, sizeof buf,
                      "cf=%.5f pde32=%.5f (%.3f%%) pde48=%.5f (%.3f%%) "
                      "mc=%.5f+-%.5f; |cf-mc|=%.2f se, |pde48-mc|=%.2f se",
                      cf, run32.price, 100 * e32, run48.price, 100 * e48,
                      mc.price, mc.std_error, cf_mc_se, pde_mc_se);
        d = buf;
        return e32 < 0.02 && e48 < e32 && cf_mc_se < 3.0;
    });

    criterion(7, "completeness diagnostic (call)", [](std::string& d) {
        const ModelParams m = benchmark_model();
        const auto t = transform(m);
        const auto rep = validate(t, 4.0); // calls need gamma > 2
        if (!rep.admissible) {
            d = "call weight inadmissible";
            return false;
        }
        const TensorBasis basis(48, 48);
        const auto grid = QuadratureGrid::for_weight(rep.weight, 48, 48);
        const auto mats = assemble(basis, grid, t, rep.weight);
        const auto pr =
            project_payoff(Payoff::call(m.strike), basis, grid, rep.weight);
        SolveConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_end = 0.5;
        cfg.snapshot_times = {0.25, 0.5};
        const auto res = evolve(mats, pr.coeffs, cfg);
        const auto [xg, vg] = completeness_grid(t, m.sigma);
        std::vector<PriceSurface> surfaces;
        for (const auto& [tt, state] : res.snapshots)
            surfaces.push_back(price_surface(state, basis, m, tt, xg, vg));
        const auto crep = completeness_report(surfaces, 1e-12);
        // closed-form vega sign at the central point
        const double dv = 1e-4;
        ModelParams mt = m;
        mt.maturity = 0.25;
        const double vega =
            (closed_form_price(mt, kBenchS0, kBenchV0 + dv, true) -
             closed_form_price(mt, kBenchS0, kBenchV0 - dv, true)) /
            (2 * dv);
        bool ok = vega > 0.0;
        std::string det = "cf_vega=" + std::to_string(vega);
        for (const auto& s : crep.slices) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "; t=%.2f min=%.4f zero_frac=%.4f", s.time_to_maturity,
                          s.min_du_dxi, s.zero_set_fraction);
            det += buf;
            ok = ok && s.positive && s.zero_set_fraction == 0.0;
        }
        d = det;
        return ok;
    });

    criterion(8, "reduction identities", [](std::string& d) {
        const ModelParams m = benchmark_model();
        const auto t = transform(m);
        const auto rep = validate(t, kPutGamma);
        const TensorBasis basis(16, 16);
        const auto grid = QuadratureGrid::for_weight(rep.weight, 16, 16);
        const auto mats = assemble(basis, grid, t, rep.weight);
        const auto pr =
            project_payoff(Payoff::put(m.strike), basis, grid, rep.weight);
        SolveConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_end = 0.25;
        auto mdist = [&](const CoefficientVector& a, const CoefficientVector& b) {
            const Eigen::VectorXcd diff = a.c - b.c;
            return std::sqrt(std::abs((diff.adjoint() * mats.M * diff)(0)));
        };
        const auto real = evolve(mats, pr.coeffs, cfg);
        const double nref =
            std::sqrt(std::abs((real.final_state.c.adjoint() * mats.M *
                                real.final_state.c)(0)));

        const auto shifted =
            evolve_shifted(mats, pr.coeffs, ShiftParams{}, cfg, grid);
        const double d1 = mdist(real.final_state, shifted.final_state) / nref;

        PathParams p0;
        p0.t_prime = 0.25;
        const auto path = evolve_along_path(mats, pr.coeffs, p0, cfg);
        const double d2 = mdist(real.final_state, path.final_state) / nref;

        ShiftParams plus;
        plus.y = 0.05;
        plus.omega = 0.04;
        ShiftParams minus;
        minus.y = -0.05;
        minus.omega = -0.04;
        const auto rp = evolve_shifted(mats, pr.coeffs, plus, cfg, grid);
        auto rmc = evolve_shifted(mats, pr.coeffs, minus, cfg, grid).final_state;
        rmc.c = rmc.c.conjugate();
        const double d3 = mdist(rp.final_state, rmc) / nref;

        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "shift0 %.2e, path0 %.2e, conj %.2e (<= 1e-12)", d1, d2, d3);
        d = buf;
        return d1 <= 1e-12 && d2 <= 1e-12 && d3 <= 1e-12;
    });

    std::printf("%d of 8 criteria passed\n", 8 - g_failures);
    return g_failures;
}
