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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "hestonpde/evolution.hpp"
#include "hestonpde/oracle.hpp"
#include "hestonpde/pricing.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "hestonpde 0.1.0";

// exit codes: 0 ok, 1 malformed config, 2 validation failure,
// 3 assertion/envelope violation
enum ExitCode { kOk = 0, kBadConfig = 1, kValidationFailed = 2, kAssertFailed = 3 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("/" + where + "/" + it.key() + ": unknown key");
}

struct RunConfig {
    heston::ModelParams model;
    double s0 = 0.0, v0 = 0.0;
    std::string payoff = "put";
    double gamma = 0.0; // 0 = default by payoff
    double beta_override = 0.0;
    int m_max = 32, n_max = 32;
    json grid_overrides;
    heston::SolveConfig solve;
    heston::ShiftParams shift;
    heston::PathParams path;
    heston::McConfig mc;
    std::vector<double> snapshot_times;
    std::string output_dir = "out";
    bool export_matrices = false;
    std::int64_t dump_paths = 0;
    json raw;

    static RunConfig load(const std::string& path);
    double effective_gamma() const {
        if (gamma > 0) return gamma;
        return payoff == "call" ? 2.5 : 0.5;
    }
    heston::Payoff make_payoff() const {
        return payoff == "call" ? heston::Payoff::call(model.strike)
                                : heston::Payoff::put(model.strike);
    }
};

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    reject_unknown_keys(j, {"model", "spot", "payoff", "weight", "basis", "grid",
                            "solve", "shift", "path", "mc", "output_dir",
                            "snapshot_times", "export_matrices", "dump_paths"},
                        "");
    RunConfig c;
    c.raw = j;
    if (!j.contains("model")) throw ConfigError("/model: required");
    reject_unknown_keys(j["model"], {"r", "q", "kappa", "theta", "sigma", "rho",
                                     "lambda", "strike", "maturity"}, "model");
    try {
        c.model = heston::ModelParams::from_json(j["model"]);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("/model: ") + e.what());
    }
    if (j.contains("spot")) {
        reject_unknown_keys(j["spot"], {"s0", "v0"}, "spot");
        c.s0 = j["spot"].value("s0", 0.0);
        c.v0 = j["spot"].value("v0", 0.0);
    }
    c.payoff = j.value("payoff", std::string("put"));
    if (c.payoff != "put" && c.payoff != "call")
        throw ConfigError("/payoff: must be 'put' or 'call'");
    if (j.contains("weight")) {
        reject_unknown_keys(j["weight"], {"gamma", "beta"}, "weight");
        c.gamma = j["weight"].value("gamma", 0.0);
        c.beta_override = j["weight"].value("beta", 0.0);
    }
    if (j.contains("basis")) {
        reject_unknown_keys(j["basis"], {"m_max", "n_max"}, "basis");
        c.m_max = j["basis"].value("m_max", 32);
        c.n_max = j["basis"].value("n_max", 32);
    }
    if (j.contains("grid")) {
        reject_unknown_keys(j["grid"],
                            {"x_max", "xi_max", "x_panels_half", "xi_panels",
                             "points_per_panel", "x_ratio", "xi_ratio"},
                            "grid");
        c.grid_overrides = j["grid"];
    }
    if (j.contains("solve")) {
        reject_unknown_keys(j["solve"], {"dt", "theta_scheme", "t_end"}, "solve");
        c.solve.dt = j["solve"].value("dt", 1e-3);
        c.solve.theta_scheme = j["solve"].value("theta_scheme", 1.0);
        c.solve.t_end = j["solve"].value("t_end", c.model.maturity);
    } else {
        c.solve.t_end = c.model.maturity;
    }
    if (j.contains("shift")) {
        reject_unknown_keys(j["shift"], {"y", "omega", "omega_star_re",
                                         "omega_star_im"}, "shift");
        c.shift.y = j["shift"].value("y", 0.0);
        c.shift.omega = j["shift"].value("omega", 0.0);
        c.shift.omega_star = {j["shift"].value("omega_star_re", 0.0),
                              j["shift"].value("omega_star_im", 0.0)};
    }
    if (j.contains("path")) {
        reject_unknown_keys(j["path"], {"y0", "omega0", "phi", "t_prime",
                                        "kappa0", "nu0"}, "path");
        c.path.y0 = j["path"].value("y0", 0.0);
        c.path.omega0 = j["path"].value("omega0", 0.0);
        c.path.phi = j["path"].value("phi", 0.0);
        c.path.t_prime = j["path"].value("t_prime", 0.25);
        c.path.kappa0 = j["path"].value("kappa0", 0.1);
        c.path.nu0 = j["path"].value("nu0", 10.0);
    }
    if (j.contains("mc")) c.mc = heston::McConfig::from_json(j["mc"]);
    if (j.contains("snapshot_times"))
        c.snapshot_times = j["snapshot_times"].get<std::vector<double>>();
    c.output_dir = j.value("output_dir", std::string("out"));
    c.export_matrices = j.value("export_matrices", false);
    c.dump_paths = j.value("dump_paths", std::int64_t(0));
    return c;
}

void write_sidecar(const fs::path& artifact, const RunConfig& cfg,
                   const json& extra = {}) {
    json meta = {{"version", kVersion}, {"config", cfg.raw}};
    if (!extra.is_null()) meta["result"] = extra;
    std::ofstream out(artifact.string() + ".meta.json");
    out << meta.dump(2) << "\n";
}

struct Workspace {
    heston::TransformedParams t;
    heston::AdmissibilityReport rep;
    heston::TensorBasis basis{0, 0};
    heston::QuadratureGrid grid{heston::GridSpec{1, 1, 1, 1, 2}};
    heston::OperatorMatrices mats;
};

Workspace prepare(const RunConfig& cfg) {
    Workspace w{heston::transform(cfg.model), {},
                heston::TensorBasis(cfg.m_max, cfg.n_max),
                heston::QuadratureGrid(heston::GridSpec{1, 1, 1, 1, 2}), {}};
    std::optional<double> beta;
    if (cfg.beta_override > 0) beta = cfg.beta_override;
    w.rep = heston::validate(w.t, cfg.effective_gamma(), beta);
    if (!w.rep.admissible) return w;
    heston::GridSpec gs =
        heston::QuadratureGrid::weight_spec(w.rep.weight, cfg.m_max, cfg.n_max);
    if (!cfg.grid_overrides.is_null()) {
        const auto& g = cfg.grid_overrides;
        gs.x_max = g.value("x_max", gs.x_max);
        gs.xi_max = g.value("xi_max", gs.xi_max);
        gs.x_panels_half = g.value("x_panels_half", gs.x_panels_half);
        gs.xi_panels = g.value("xi_panels", gs.xi_panels);
        gs.points_per_panel = g.value("points_per_panel", gs.points_per_panel);
        gs.x_ratio = g.value("x_ratio", gs.x_ratio);
        gs.xi_ratio = g.value("xi_ratio", gs.xi_ratio);
    }
    w.grid = heston::QuadratureGrid(gs);
    w.mats = heston::assemble(w.basis, w.grid, w.t, w.rep.weight);
    return w;
}

int cmd_validate(const RunConfig& cfg) {
    const auto t = heston::transform(cfg.model);
    const auto rep = heston::validate(t, cfg.effective_gamma(),
                                      cfg.beta_override > 0
                                          ? std::optional<double>(cfg.beta_override)
                                          : std::nullopt);
    fs::create_directories(cfg.output_dir);
    const fs::path out = fs::path(cfg.output_dir) / "admissibility.json";
    std::ofstream(out) << rep.to_json().dump(2) << "\n";
    write_sidecar(out, cfg);
    std::cout << rep.to_json().dump(2) << "\n";
    return rep.admissible ? kOk : kValidationFailed;
}

int cmd_check(const RunConfig& cfg) {
    Workspace w = prepare(cfg);
    if (!w.rep.admissible) {
        std::cerr << "parameters inadmissible\n";
        return kValidationFailed;
    }
    fs::create_directories(cfg.output_dir);

    // inequality suite on a small analytic family
    std::vector<std::pair<std::string, heston::WeightedFunction>> family;
    for (double a : {0.5, 1.0})
        for (double b : {0.5, 1.0}) {
            heston::WeightedFunction f;
            f.value = [a, b](double x, double xi) {
                return heston::Complex(std::exp(-a * x * x - b * xi), 0.0);
            };
            f.dx = [a, b](double x, double xi) {
                return heston::Complex(-2.0 * a * x * std::exp(-a * x * x - b * xi), 0.0);
            };
            f.dxi = [a, b](double x, double xi) {
                return heston::Complex(-b * std::exp(-a * x * x - b * xi), 0.0);
            };
            family.emplace_back("gauss_exp_a" + std::to_string(a) + "_b" +
                                    std::to_string(b), f);
        }
    const fs::path ineq = fs::path(cfg.output_dir) / "inequalities.csv";
    std::ofstream out(ineq);
    out << "function,check,lhs,rhs,l0,l_infinity,pass\n";
    bool all_pass = true;
    for (const auto& [name, f] : family) {
        for (const auto& rep :
             {heston::check_hardy(f, w.grid, w.rep.weight),
              heston::check_sobolev(f, w.grid, w.rep.weight),
              heston::check_traces(f, w.grid, w.rep.weight)}) {
            out << name << "," << rep.name << "," << rep.lhs << "," << rep.rhs
                << "," << rep.l0 << "," << rep.l_infinity << "," << rep.pass
                << "\n";
            all_pass = all_pass && rep.pass;
        }
    }
    write_sidecar(ineq, cfg);

    const auto cc = w.rep.constants;
    const auto garding = heston::certify_garding(w.mats, cc, 500, {-0.1, -0.05, 0.05, 0.1});
    const auto bounded = heston::certify_bounded(w.mats, cc, 500);
    const fs::path certs = fs::path(cfg.output_dir) / "certifications.json";
    json jc = {{"garding", garding.to_json()}, {"bounded", bounded.to_json()}};
    std::ofstream(certs) << jc.dump(2) << "\n";
    write_sidecar(certs, cfg, jc);
    if (cfg.export_matrices) {
        for (const auto& [name, mat] :
             {std::pair<const char*, const Eigen::MatrixXd*>{"M", &w.mats.M},
              {"S", &w.mats.S},
              {"A", &w.mats.A}}) {
            const fs::path mp =
                fs::path(cfg.output_dir) / ("matrix_" + std::string(name) + ".csv");
            heston::save_matrix_csv(*mat, mp.string());
            write_sidecar(mp, cfg);
        }
    }
    std::cout << jc.dump(2) << "\n";
    all_pass = all_pass && garding.pass && bounded.pass;
    return all_pass ? kOk : kAssertFailed;
}

int cmd_solve(const RunConfig& cfg) {
    Workspace w = prepare(cfg);
    if (!w.rep.admissible) return kValidationFailed;
    const auto pr =
        heston::project_payoff(cfg.make_payoff(), w.basis, w.grid, w.rep.weight);
    heston::SolveConfig sc = cfg.solve;
    sc.snapshot_times = cfg.snapshot_times;
    const auto res = heston::evolve(w.mats, pr.coeffs, sc);
    fs::create_directories(cfg.output_dir);
    const fs::path traj = fs::path(cfg.output_dir) / "trajectory.csv";
    res.traj.save_csv(traj.string());
    const fs::path fc = fs::path(cfg.output_dir) / "final_coeffs.csv";
    res.final_state.save_csv(fc.string());
    write_sidecar(fc, cfg);
    write_sidecar(traj, cfg,
                  {{"envelope_ok", res.traj.envelope_ok},
                   {"max_excess", res.traj.max_excess},
                   {"projection_residual", pr.residual}});
    std::cout << "envelope_ok=" << res.traj.envelope_ok
              << " max_excess=" << res.traj.max_excess << "\n";
    return res.traj.envelope_ok ? kOk : kAssertFailed;
}

int cmd_price(const RunConfig& cfg) {
    Workspace w = prepare(cfg);
    if (!w.rep.admissible) return kValidationFailed;
    if (!(cfg.s0 > 0) || !(cfg.v0 > 0)) {
        std::cerr << "/spot: s0 and v0 required for price\n";
        return kBadConfig;
    }
    const auto pr =
        heston::project_payoff(cfg.make_payoff(), w.basis, w.grid, w.rep.weight);
    heston::SolveConfig sc = cfg.solve;
    sc.t_end = cfg.model.maturity;
    const auto res = heston::evolve(w.mats, pr.coeffs, sc);

    std::vector<double> xg, vg;
    for (int i = 0; i <= 40; ++i) xg.push_back(-1.0 + 2.0 * i / 40);
    for (int j = 0; j <= 40; ++j)
        vg.push_back(cfg.v0 * (0.25 + 3.75 * j / 40));
    const auto surf = heston::price_surface(res.final_state, w.basis, cfg.model,
                                            cfg.model.maturity, xg, vg);
    fs::create_directories(cfg.output_dir);
    const fs::path sp = fs::path(cfg.output_dir) / "surface.csv";
    surf.save_csv(sp.string());
    write_sidecar(sp, cfg);

    const double x0 = std::log(cfg.s0 / cfg.model.strike);
    const double pde =
        std::exp(-cfg.model.r * cfg.model.maturity) *
        heston::eval_sum(res.final_state, w.basis, x0, cfg.v0 / cfg.model.sigma)
            .real();
    const bool call = cfg.payoff == "call";
    const double cf = heston::closed_form_price(cfg.model, cfg.s0, cfg.v0, call);
    const auto mc = heston::mc_price(cfg.model, cfg.s0, cfg.v0, cfg.make_payoff(),
                                     cfg.mc);
    const fs::path cp = fs::path(cfg.output_dir) / "comparison.csv";
    {
        std::ofstream out(cp);
        out.precision(12);
        out << "method,price,abs_err_vs_closed_form,rel_err_vs_closed_form\n";
        out << "pde," << pde << "," << pde - cf << "," << (pde - cf) / cf << "\n";
        out << "closed_form," << cf << ",0,0\n";
        out << "mc," << mc.price << "," << mc.price - cf << ","
            << (mc.price - cf) / cf << "\n";
        out << "mc_stderr," << mc.std_error << ",,\n";
    }
    write_sidecar(cp, cfg,
                  {{"pde", pde}, {"closed_form", cf}, {"mc", mc.to_json()}});
    std::cout << "pde=" << pde << " closed_form=" << cf << " mc=" << mc.price
              << " (se " << mc.std_error << ")\n";
    return kOk;
}

int cmd_shift(const RunConfig& cfg) {
    Workspace w = prepare(cfg);
    if (!w.rep.admissible) return kValidationFailed;
    const auto pr =
        heston::project_payoff(cfg.make_payoff(), w.basis, w.grid, w.rep.weight);
    heston::SolveConfig sc = cfg.solve;
    fs::create_directories(cfg.output_dir);
    const auto shifted =
        heston::evolve_shifted(w.mats, pr.coeffs, cfg.shift, sc, w.grid);
    const fs::path sp = fs::path(cfg.output_dir) / "shifted_trajectory.csv";
    shifted.traj.save_csv(sp.string());
    write_sidecar(sp, cfg,
                  {{"envelope_ok", shifted.traj.envelope_ok},
                   {"max_excess", shifted.traj.max_excess}});

    const auto path = heston::evolve_along_path(w.mats, pr.coeffs, cfg.path, sc);
    const fs::path pp = fs::path(cfg.output_dir) / "path_trajectory.csv";
    path.traj.save_csv(pp.string());
    write_sidecar(pp, cfg,
                  {{"envelope_ok", path.traj.envelope_ok},
                   {"max_excess", path.traj.max_excess}});
    std::cout << "shifted max_excess=" << shifted.traj.max_excess
              << " path max_excess=" << path.traj.max_excess << "\n";
    return shifted.traj.envelope_ok && path.traj.envelope_ok ? kOk : kAssertFailed;
}

int cmd_complete(const RunConfig& cfg) {
    Workspace w = prepare(cfg);
    if (!w.rep.admissible) return kValidationFailed;
    const auto pr =
        heston::project_payoff(cfg.make_payoff(), w.basis, w.grid, w.rep.weight);
    heston::SolveConfig sc = cfg.solve;
    sc.snapshot_times = cfg.snapshot_times.empty()
                            ? std::vector<double>{0.25, 0.5}
                            : cfg.snapshot_times;
    sc.t_end = *std::max_element(sc.snapshot_times.begin(),
                                 sc.snapshot_times.end());
    const auto res = heston::evolve(w.mats, pr.coeffs, sc);
    const auto [xg, vg] = heston::completeness_grid(w.t, cfg.model.sigma);
    std::vector<heston::PriceSurface> surfaces;
    for (const auto& [tt, state] : res.snapshots)
        surfaces.push_back(heston::price_surface(state, w.basis, cfg.model,
                                                 tt, xg, vg));
    const auto rep = heston::completeness_report(surfaces, 1e-12);
    fs::create_directories(cfg.output_dir);
    const fs::path cp = fs::path(cfg.output_dir) / "completeness.json";
    std::ofstream(cp) << rep.to_json().dump(2) << "\n";
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
        const fs::path smp =
            fs::path(cfg.output_dir) / ("sign_map_" + std::to_string(i) + ".csv");
        heston::save_sign_map_csv(surfaces[i], smp.string());
        write_sidecar(smp, cfg);
    }
    write_sidecar(cp, cfg, rep.to_json());
    std::cout << rep.to_json().dump(2) << "\n";
    return rep.pass ? kOk : kAssertFailed;
}

int cmd_mc(const RunConfig& cfg) {
    if (!(cfg.s0 > 0) || !(cfg.v0 > 0)) {
        std::cerr << "/spot: s0 and v0 required for mc\n";
        return kBadConfig;
    }
    const auto est =
        heston::mc_price(cfg.model, cfg.s0, cfg.v0, cfg.make_payoff(), cfg.mc);
    fs::create_directories(cfg.output_dir);
    const fs::path mp = fs::path(cfg.output_dir) / "mc.json";
    std::ofstream(mp) << est.to_json().dump(2) << "\n";
    write_sidecar(mp, cfg, est.to_json());
    if (cfg.dump_paths > 0) {
        const fs::path dp = fs::path(cfg.output_dir) / "mc_paths.csv";
        heston::mc_dump_paths(cfg.model, cfg.s0, cfg.v0, cfg.make_payoff(),
                              cfg.mc, cfg.dump_paths, dp.string());
        write_sidecar(dp, cfg);
    }
    std::cout << est.to_json().dump(2) << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted spectral-Galerkin solver and verification suite for "
                 "the Heston pricing PDE"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string subname;
    for (const char* name : {"validate", "check", "solve", "price", "shift",
                             "complete", "mc"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("config", config_path, "JSON config file")->required();
        sub->callback([&subname, name]() { subname = name; });
    }

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        cfg = RunConfig::load(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kBadConfig;
    }
    try {
        if (subname == "validate") return cmd_validate(cfg);
        if (subname == "check") return cmd_check(cfg);
        if (subname == "solve") return cmd_solve(cfg);
        if (subname == "price") return cmd_price(cfg);
        if (subname == "shift") return cmd_shift(cfg);
        if (subname == "complete") return cmd_complete(cfg);
        if (subname == "mc") return cmd_mc(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kAssertFailed;
    }
    return kBadConfig;
}
