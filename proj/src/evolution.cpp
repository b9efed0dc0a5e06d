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

#include "hestonpde/evolution.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace heston {

void SolveConfig::check() const {
    if (!(dt > 0)) throw std::invalid_argument("dt must be > 0");
    if (!(t_end >= dt)) throw std::invalid_argument("t_end must be >= dt");
    if (theta_scheme < 0.5 || theta_scheme > 1.0)
        throw std::invalid_argument("theta_scheme must lie in [1/2, 1]");
}

void PathParams::check() const {
    if (!(t_prime > 0) || !(kappa0 > 0) || !(nu0 > 0))
        throw std::invalid_argument("path: t_prime, kappa0, nu0 must be positive");
    if (kappa0 * t_prime > M_PI / 4.0 + 1e-15)
        throw std::invalid_argument("path: kappa0 * t_prime must be <= pi/4");
    const double lim = kappa0 * t_prime;
    if (!(std::max(std::abs(y0), std::abs(std::atan(omega0))) < lim))
        throw std::invalid_argument(
            "path: max{|y0|, |arctan omega0|} must be < kappa0 * t_prime");
    if (!(std::abs(phi) < 1.0 / nu0))
        throw std::invalid_argument("path: |phi| must be < 1/nu0");
}

bool in_gamma(double y, double omega, double alpha, double tau,
              const PathParams& p) {
    if (!(alpha > 0)) throw std::invalid_argument("in_gamma: alpha must be > 0");
    const double lim = p.kappa0 * std::min(alpha, p.t_prime);
    return std::max(std::abs(y), std::abs(std::atan(omega))) < lim &&
           p.nu0 * std::abs(tau) < alpha;
}

void TrajectoryReport::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "step,t,h_norm,v_norm,envelope,slack\n";
    out.precision(17);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& s = steps[i];
        out << i << "," << s.t << "," << s.h_norm << "," << s.v_norm << ","
            << s.envelope << "," << s.envelope - s.h_norm << "\n";
    }
}

namespace {

struct Stepper {
    const WhitenedSystem& ws;
    const SolveConfig& cfg;
    double c2_prime;
    double envelope_rate; ///< c2'/2 for autonomous solves, c2' along the path

    TrajectoryReport traj;
    std::vector<std::pair<double, CoefficientVector>> snapshots;
    Eigen::VectorXcd chat;
    double forcing_integral = 0.0;
    double n0 = 0.0;

    Stepper(const WhitenedSystem& w, const SolveConfig& c, double c2p,
            double rate)
        : ws(w), cfg(c), c2_prime(c2p), envelope_rate(rate) {}

    void start(const Eigen::VectorXcd& chat0) {
        chat = chat0;
        n0 = chat.norm();
        record(0.0);
    }

    void record(double t) {
        StepRecord r;
        r.t = t;
        r.h_norm = chat.norm();
        r.v_norm = std::sqrt(ws.v_norm_sq(chat));
        r.envelope = std::exp(envelope_rate * t) * (n0 + forcing_integral);
        const double excess =
            r.envelope > 0 ? r.h_norm / r.envelope - 1.0 : (r.h_norm > 0 ? 1.0 : 0.0);
        r.violated = excess > cfg.envelope_tol;
        if (!traj.steps.empty() && r.h_norm > 0 && traj.steps.back().h_norm > 0) {
            const double slope = std::log(r.h_norm / traj.steps.back().h_norm) /
                                 (t - traj.steps.back().t);
            traj.growth_rate = std::max(traj.growth_rate, slope);
        }
        traj.max_excess = std::max(traj.max_excess, excess);
        traj.envelope_ok = traj.envelope_ok && !r.violated;
        traj.steps.push_back(r);
        for (double ts : cfg.snapshot_times)
            if (std::abs(t - ts) < 0.5 * cfg.dt)
                snapshots.emplace_back(t, to_state());
    }

    CoefficientVector to_state() const {
        CoefficientVector out(ws.mats().basis.m_max(), ws.mats().basis.n_max());
        out.c = ws.expand(chat);
        return out;
    }
};

void check_residual(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu,
                    const Eigen::MatrixXcd& lhs, const Eigen::VectorXcd& sol,
                    const Eigen::VectorXcd& rhs) {
    const double rn = rhs.norm();
    if (rn == 0.0) return;
    const double resid = (lhs * sol - rhs).norm() / rn;
    if (resid > 1e-8) {
        const double cond = lhs.norm() * lu.inverse().norm();
        throw std::runtime_error(
            "linear solve failed: relative residual " + std::to_string(resid) +
            ", condition estimate " + std::to_string(cond));
    }
}

EvolveResult run_autonomous(const OperatorMatrices& mats,
                            const Eigen::VectorXcd& chat0,
                            const Eigen::MatrixXcd& ahat, const SolveConfig& cfg,
                            const WhitenedSystem& ws) {
    const CoercivityConstants cc = coercivity_constants(mats.params, mats.weight);
    Stepper st(ws, cfg, cc.c2_prime, 0.5 * cc.c2_prime);
    st.start(chat0);

    const int k = static_cast<int>(chat0.size());
    const double th = cfg.theta_scheme;
    const Eigen::MatrixXcd lhs =
        Eigen::MatrixXcd::Identity(k, k) + cfg.dt * th * ahat;
    const Eigen::MatrixXcd rhsm =
        Eigen::MatrixXcd::Identity(k, k) - cfg.dt * (1.0 - th) * ahat;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);

    const int nsteps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
    for (int n = 0; n < nsteps; ++n) {
        Eigen::VectorXcd rhs = rhsm * st.chat;
        if (cfg.forcing) {
            const double t_eval = (n + th) * cfg.dt;
            const Eigen::VectorXcd fh = ws.reduce(cfg.forcing(t_eval));
            rhs += cfg.dt * fh;
            st.forcing_integral += cfg.dt * fh.norm();
        }
        const Eigen::VectorXcd next = lu.solve(rhs);
        if (n == 0) check_residual(lu, lhs, next, rhs);
        st.chat = next;
        st.record((n + 1) * cfg.dt);
    }
    EvolveResult res;
    res.traj = std::move(st.traj);
    res.final_state = st.to_state();
    res.snapshots = std::move(st.snapshots);
    return res;
}

} // namespace

EvolveResult evolve(const OperatorMatrices& mats, const CoefficientVector& c0,
                    const SolveConfig& cfg) {
    cfg.check();
    if (c0.m_max != mats.basis.m_max() || c0.n_max != mats.basis.n_max())
        throw std::invalid_argument("evolve: state and matrices use different bases");
    WhitenedSystem ws(mats);
    return run_autonomous(mats, ws.reduce(c0.c), ws.Ahat().cast<Complex>(), cfg, ws);
}

EvolveResult evolve_shifted(const OperatorMatrices& mats, const CoefficientVector& c0,
                            const ShiftParams& shift, const SolveConfig& cfg,
                            const QuadratureGrid& grid) {
    cfg.check();
    shift.check();
    if (c0.m_max != mats.basis.m_max() || c0.n_max != mats.basis.n_max())
        throw std::invalid_argument("evolve_shifted: basis mismatch");
    WhitenedSystem ws(mats);

    Eigen::VectorXcd v0;
    if (shift.lambda() == Complex(0, 0) && shift.y == 0.0) {
        // the shift map is the identity on the span
        v0 = ws.reduce(c0.c);
    } else {
        const Complex zs(0.0, shift.y);
        const Complex ray = Complex(1.0, shift.omega) + shift.omega_star;
        auto shifted_eval = [&](double x, double xi) {
            return eval_sum(c0, mats.basis, Complex(x, 0.0) + zs, xi * ray);
        };
        const ProjectionResult pr =
            project(shifted_eval, mats.basis, grid, mats.weight);
        v0 = ws.reduce(pr.coeffs.c);
    }
    return run_autonomous(mats, v0, ws.shifted_hat(shift), cfg, ws);
}

EvolveResult evolve_along_path(const OperatorMatrices& mats,
                               const CoefficientVector& c0, const PathParams& path,
                               const SolveConfig& cfg, bool weak_l3) {
    cfg.check();
    path.check();
    if (c0.m_max != mats.basis.m_max() || c0.n_max != mats.basis.n_max())
        throw std::invalid_argument("evolve_along_path: basis mismatch");
    WhitenedSystem ws(mats);

    // align steps with the ramp end
    SolveConfig acfg = cfg;
    if (path.t_prime < cfg.t_end) {
        const int ramp_steps =
            std::max(1, static_cast<int>(std::llround(path.t_prime / cfg.dt)));
        acfg.dt = path.t_prime / ramp_steps;
    }
    const int nsteps = static_cast<int>(std::ceil(cfg.t_end / acfg.dt - 1e-12));

    const CoercivityConstants cc = coercivity_constants(mats.params, mats.weight);
    Stepper st(ws, acfg, cc.c2_prime, cc.c2_prime);
    st.start(ws.reduce(c0.c));

    const TransformedParams& t = mats.params;
    const WeightParams& w = mats.weight;
    const Blocks1D& b = mats.blk;
    const Complex I(0.0, 1.0);
    const Complex onephi(1.0, path.phi);

    // weak-form alternative for the second-derivative blocks of L3:
    //   int h'' h  = -int h' h' + gamma int sign x h' h
    //   int l'' l xi = -int l' l' xi - beta int l' l + mu int l' l xi
    Eigen::MatrixXd x20w, q20w;
    if (weak_l3) {
        x20w = -b.x11 + w.gamma * b.xs10;
        q20w = -b.q11x - w.beta * b.q10 + w.mu * b.q10x;
    }
    const Eigen::MatrixXd& x20 = weak_l3 ? x20w : b.x20;
    const Eigen::MatrixXd& q20 = weak_l3 ? q20w : b.q20x;

    auto ahat_at = [&](double s) {
        const double chi = std::min(s / path.t_prime, 1.0);
        const double chip = s <= path.t_prime ? 1.0 : 0.0;
        const Complex g = 1.0 / (1.0 + I * chi * path.omega0);
        std::vector<std::tuple<Complex, const Eigen::MatrixXd*, const Eigen::MatrixXd*>>
            terms;
        // -i (y0/T') L1, L1 = chi' d/dx
        if (chip != 0.0 && path.y0 != 0.0)
            terms.push_back({-I * (path.y0 / path.t_prime) * chip, &b.x10, &b.q00});
        // -i (omega0/T') L2, L2 = chi' g xi d/dxi
        if (chip != 0.0 && path.omega0 != 0.0)
            terms.push_back(
                {-I * (path.omega0 / path.t_prime) * chip * g, &b.x00, &b.q10x});
        // + (i/2)(1+i phi) sigma omega0 L3,
        // L3 = -chi xi [dxx - g dxixi - dx]
        if (path.omega0 != 0.0 && chi != 0.0) {
            const Complex c3 = 0.5 * I * onephi * t.sigma * path.omega0 * (-chi);
            terms.push_back({c3, &x20, &b.q00x});
            terms.push_back({-c3 * g, &b.x00, &q20});
            terms.push_back({-c3, &b.x10, &b.q00x});
            // + i (1+i phi) kappa theta_sigma omega0 L4, L4 = chi g d/dxi
            terms.push_back({I * onephi * t.kappa_star * t.theta_sigma *
                                 path.omega0 * chi * g,
                             &b.x00, &b.q10});
        }
        Eigen::MatrixXcd out = onephi * ws.Ahat();
        if (!terms.empty()) out += ws.combine(terms);
        return out;
    };

    const int k = ws.kept();
    const double th = acfg.theta_scheme;
    for (int n = 0; n < nsteps; ++n) {
        const double s_now = n * acfg.dt;
        const double s_next = (n + 1) * acfg.dt;
        Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Identity(k, k);
        Eigen::VectorXcd rhs = st.chat;
        if (th < 1.0) {
            const Eigen::MatrixXcd an = ahat_at(s_now);
            rhs -= acfg.dt * (1.0 - th) * (an * st.chat);
        }
        lhs += acfg.dt * th * ahat_at(s_next);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);
        const Eigen::VectorXcd next = lu.solve(rhs);
        if (n == 0) check_residual(lu, lhs, next, rhs);

        // one-step form of d/ds ||v||^2 <= c2' ||v||^2; reject on violation
        const double n2_now = st.chat.squaredNorm();
        const double n2_next = next.squaredNorm();
        const double deriv = (n2_next - n2_now) / acfg.dt;
        const double scale = std::max(n2_now, n2_next);
        const double allowed =
            cc.c2_prime * scale + cfg.envelope_tol * (1.0 + cc.c2_prime) * scale;
        if (deriv > allowed)
            throw std::runtime_error(
                "path solve: discrete norm-derivative bound violated at step " +
                std::to_string(n) + " (excess " +
                std::to_string(deriv - allowed) + ")");
        st.chat = next;
        st.record(s_next);
    }

    EvolveResult res;
    res.traj = std::move(st.traj);
    res.final_state = st.to_state();
    res.snapshots = std::move(st.snapshots);
    return res;
}

} // namespace heston
