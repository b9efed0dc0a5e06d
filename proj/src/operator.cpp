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

#include "hestonpde/operator.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace heston {

void ShiftParams::check() const {
    if (std::abs(omega_star) > 0.5)
        throw std::invalid_argument("shift: |omega_star| must be <= 1/2");
    if (std::abs(omega) > 0.5)
        throw std::invalid_argument("shift: |omega| must be <= 1/2");
}

namespace {

// B[a, b] = int f_a(x) g_b(x) extra(x) e^{-gamma|x|} dx
Eigen::MatrixXd xblock(const Eigen::MatrixXd& fa, const Eigen::MatrixXd& gb,
                       const QuadratureGrid& grid, const WeightParams& w,
                       bool sign_x) {
    Eigen::VectorXd wv(grid.x().size());
    for (std::size_t i = 0; i < grid.x().size(); ++i) {
        double v = grid.wx()[i] * std::exp(-w.gamma * std::abs(grid.x()[i]));
        if (sign_x) v *= grid.x()[i] > 0 ? 1.0 : -1.0;
        wv(i) = v;
    }
    return fa.transpose() * wv.asDiagonal() * gb;
}

// B[a, b] = int f_a(xi) g_b(xi) xi^pow xi^{beta-1} e^{-mu xi} dxi
Eigen::MatrixXd qblock(const Eigen::MatrixXd& fa, const Eigen::MatrixXd& gb,
                       const QuadratureGrid& grid, const WeightParams& w,
                       double pow_xi) {
    Eigen::VectorXd wv(grid.xi().size());
    for (std::size_t j = 0; j < grid.xi().size(); ++j)
        wv(j) = grid.wxi()[j] *
                std::pow(grid.xi()[j], w.beta - 1.0 + pow_xi) *
                std::exp(-w.mu * grid.xi()[j]);
    return fa.transpose() * wv.asDiagonal() * gb;
}

void symmetrize(Eigen::MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

// dense kron accumulate: out[j,k] += coeff * X[k_m, j_m] * Q[k_n, j_n]
// with j = (j_m, j_n) test, k = (k_m, k_n) trial.
void kron_add(Eigen::MatrixXd& out, double coeff, const Eigen::MatrixXd& X,
              const Eigen::MatrixXd& Q) {
    const int mx = static_cast<int>(X.rows());
    const int nq = static_cast<int>(Q.rows());
    for (int jm = 0; jm < mx; ++jm)
        for (int jn = 0; jn < nq; ++jn) {
            const int j = jm * nq + jn;
            for (int km = 0; km < mx; ++km)
                for (int kn = 0; kn < nq; ++kn)
                    out(j, km * nq + kn) += coeff * X(km, jm) * Q(kn, jn);
        }
}

struct FormCoeffs {
    double sig, rho, gamma, beta, mu, kappa, theta_sigma, q_r;
};

FormCoeffs coeffs_of(const TransformedParams& t, const WeightParams& w) {
    return {t.sigma, t.rho, w.gamma, w.beta, w.mu,
            t.kappa_star, t.theta_sigma, t.q_r};
}

} // namespace

OperatorMatrices assemble(const TensorBasis& basis, const QuadratureGrid& grid,
                          const TransformedParams& t, const WeightParams& w) {
    OperatorMatrices om;
    om.basis = basis;
    om.params = t;
    om.weight = w;

    const Eigen::MatrixXd h0 = basis.hermite_matrix(grid.x(), 0);
    const Eigen::MatrixXd h1 = basis.hermite_matrix(grid.x(), 1);
    const Eigen::MatrixXd h2 = basis.hermite_matrix(grid.x(), 2);
    const Eigen::MatrixXd l0 = basis.laguerre_matrix(grid.xi(), 0);
    const Eigen::MatrixXd l1 = basis.laguerre_matrix(grid.xi(), 1);
    const Eigen::MatrixXd l2 = basis.laguerre_matrix(grid.xi(), 2);

    Blocks1D& b = om.blk;
    b.x00 = xblock(h0, h0, grid, w, false);
    b.x10 = xblock(h1, h0, grid, w, false);
    b.x11 = xblock(h1, h1, grid, w, false);
    b.xs00 = xblock(h0, h0, grid, w, true);
    b.xs10 = xblock(h1, h0, grid, w, true);
    b.x20 = xblock(h2, h0, grid, w, false);
    b.q00 = qblock(l0, l0, grid, w, 0.0);
    b.q00x = qblock(l0, l0, grid, w, 1.0);
    b.q10 = qblock(l1, l0, grid, w, 0.0);
    b.q10x = qblock(l1, l0, grid, w, 1.0);
    b.q11x = qblock(l1, l1, grid, w, 1.0);
    b.q20x = qblock(l2, l0, grid, w, 1.0);
    symmetrize(b.x00);
    symmetrize(b.x11);
    symmetrize(b.xs00);
    symmetrize(b.q00);
    symmetrize(b.q00x);
    symmetrize(b.q11x);

    const int n = basis.size();
    const FormCoeffs c = coeffs_of(t, w);

    om.M = Eigen::MatrixXd::Zero(n, n);
    kron_add(om.M, 1.0, b.x00, b.q00);
    om.S = Eigen::MatrixXd::Zero(n, n);
    kron_add(om.S, 1.0, b.x11, b.q00x);
    kron_add(om.S, 1.0, b.x00, b.q11x);

    om.A = Eigen::MatrixXd::Zero(n, n);
    // principal gradient group
    kron_add(om.A, 0.5 * c.sig, b.x11, b.q00x);
    Eigen::MatrixXd x01 = b.x10.transpose(); // int h_a h_b' = x10[b,a]
    kron_add(om.A, c.sig * c.rho, x01, b.q10x);
    kron_add(om.A, 0.5 * c.sig, b.x00, b.q11x);
    // (sigma/2)(1 - gamma sign x) u_x wbar xi w
    kron_add(om.A, 0.5 * c.sig, b.x10, b.q00x);
    kron_add(om.A, -0.5 * c.sig * c.gamma, b.xs10, b.q00x);
    // (kappa - gamma rho sigma sign x - mu sigma / 2) u_xi wbar xi w
    kron_add(om.A, c.kappa - 0.5 * c.mu * c.sig, b.x00, b.q10x);
    kron_add(om.A, -c.gamma * c.rho * c.sig, b.xs00, b.q10x);
    // q_r u_x wbar w
    kron_add(om.A, c.q_r, b.x10, b.q00);
    // (beta sigma / 2 - kappa theta_sigma) u_xi wbar w
    kron_add(om.A, 0.5 * c.beta * c.sig - c.kappa * c.theta_sigma, b.x00, b.q10);
    return om;
}

Eigen::MatrixXcd OperatorMatrices::shifted(const ShiftParams& s) const {
    s.check();
    const Complex lam = s.lambda();
    const Complex g = 1.0 / (1.0 + lam);
    const FormCoeffs c = coeffs_of(params, weight);
    Eigen::MatrixXcd out = A.cast<Complex>();
    if (lam == Complex(0.0, 0.0)) return out;

    auto add = [&](Complex coeff, const Eigen::MatrixXd& X, const Eigen::MatrixXd& Q) {
        const int nq = static_cast<int>(Q.rows());
        const int mx = static_cast<int>(X.rows());
        for (int jm = 0; jm < mx; ++jm)
            for (int jn = 0; jn < nq; ++jn) {
                const int j = jm * nq + jn;
                for (int km = 0; km < mx; ++km)
                    for (int kn = 0; kn < nq; ++kn)
                        out(j, km * nq + kn) += coeff * X(km, jm) * Q(kn, jn);
            }
    };
    add(0.5 * c.sig * lam, blk.x11, blk.q00x);
    add(-0.5 * c.sig * lam * g, blk.x00, blk.q11x);
    add(0.5 * c.sig * lam, blk.x10, blk.q00x);
    add(-0.5 * c.sig * lam * c.gamma, blk.xs10, blk.q00x);
    add(0.5 * c.sig * lam * g * c.mu, blk.x00, blk.q10x);
    add(-lam * g * (0.5 * c.beta * c.sig - c.kappa * c.theta_sigma), blk.x00,
        blk.q10);
    return out;
}

double form_entry_direct(const TensorBasis& basis, int m_trial, int n_trial,
                         int m_test, int n_test, const QuadratureGrid& grid,
                         const TransformedParams& t, const WeightParams& w) {
    basis.index(m_trial, n_trial);
    basis.index(m_test, n_test);
    const FormCoeffs c = coeffs_of(t, w);
    double acc = 0.0;
    std::vector<double> hu, dhu, lu, dlu;
    for (std::size_t i = 0; i < grid.x().size(); ++i) {
        const double x = grid.x()[i];
        const double sgn = x > 0 ? 1.0 : -1.0;
        hermite_all(x, std::max(m_trial, m_test), hu, &dhu);
        const double w1 = grid.wx()[i] * std::exp(-w.gamma * std::abs(x));
        for (std::size_t j = 0; j < grid.xi().size(); ++j) {
            const double xi = grid.xi()[j];
            laguerre_all(xi, std::max(n_trial, n_test), lu, &dlu);
            const double wq = grid.wxi()[j] * std::pow(xi, w.beta - 1.0) *
                              std::exp(-w.mu * xi);
            const double ux = dhu[m_trial] * lu[n_trial];
            const double uxi = hu[m_trial] * dlu[n_trial];
            const double v = hu[m_test] * lu[n_test];
            const double vx = dhu[m_test] * lu[n_test];
            const double vxi = hu[m_test] * dlu[n_test];
            double integrand =
                0.5 * c.sig * (ux * vx + 2.0 * c.rho * uxi * vx + uxi * vxi) * xi +
                0.5 * c.sig * (1.0 - c.gamma * sgn) * ux * v * xi +
                (c.kappa - c.gamma * c.rho * c.sig * sgn - 0.5 * c.mu * c.sig) *
                    uxi * v * xi +
                c.q_r * ux * v +
                (0.5 * c.beta * c.sig - c.kappa * c.theta_sigma) * uxi * v;
            acc += w1 * wq * integrand;
        }
    }
    return acc;
}

WhitenedSystem::WhitenedSystem(const OperatorMatrices& mats, double eps)
    : mats_(&mats) {
    const int nm = mats.basis.m_max() + 1;
    const int nn = mats.basis.n_max() + 1;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(mats.blk.x00);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(mats.blk.q00);
    if (ex.info() != Eigen::Success || eq.info() != Eigen::Success)
        throw std::runtime_error("mass factor eigendecomposition failed");
    ux_ = ex.eigenvectors();
    uq_ = eq.eigenvectors();
    lx_ = ex.eigenvalues().cwiseMax(0.0);
    lq_ = eq.eigenvalues().cwiseMax(0.0);

    const double cut = eps * lx_.maxCoeff() * lq_.maxCoeff();
    for (int i = 0; i < nm; ++i)
        for (int j = 0; j < nn; ++j)
            if (lx_(i) * lq_(j) > cut) kept_.emplace_back(i, j);
    if (kept_.empty())
        throw std::runtime_error("mass matrix numerically rank deficient");

    const int k = static_cast<int>(kept_.size());
    dkept_.resize(k);
    map_.resize(nm * nn, k);
    for (int p = 0; p < k; ++p) {
        const auto [i, j] = kept_[p];
        dkept_(p) = std::sqrt(lx_(i) * lq_(j));
        for (int m = 0; m < nm; ++m)
            for (int n = 0; n < nn; ++n)
                map_(m * nn + n, p) = ux_(m, i) * uq_(n, j) / dkept_(p);
    }

    for (auto& p : srcx_) p = nullptr;
    for (auto& p : srcq_) p = nullptr;

    const FormCoeffs c = coeffs_of(mats.params, mats.weight);
    const Blocks1D& b = mats.blk;
    x01_ = b.x10.transpose();
    ahat_ = combine_real({{0.5 * c.sig, &b.x11, &b.q00x},
                          {c.sig * c.rho, &x01_, &b.q10x},
                          {0.5 * c.sig, &b.x00, &b.q11x},
                          {0.5 * c.sig, &b.x10, &b.q00x},
                          {-0.5 * c.sig * c.gamma, &b.xs10, &b.q00x},
                          {c.kappa - 0.5 * c.mu * c.sig, &b.x00, &b.q10x},
                          {-c.gamma * c.rho * c.sig, &b.xs00, &b.q10x},
                          {c.q_r, &b.x10, &b.q00},
                          {0.5 * c.beta * c.sig - c.kappa * c.theta_sigma,
                           &b.x00, &b.q10}});
    shat_ = combine_real({{1.0, &b.x11, &b.q00x}, {1.0, &b.x00, &b.q11x}});
}

const Eigen::MatrixXd& WhitenedSystem::tx(const Eigen::MatrixXd* bptr) const {
    auto* self = const_cast<WhitenedSystem*>(this);
    for (int i = 0; i < 12; ++i) {
        if (self->srcx_[i] == bptr) return self->tx_[i];
        if (self->srcx_[i] == nullptr) {
            self->srcx_[i] = bptr;
            self->tx_[i] = ux_.transpose() * (*bptr) * ux_;
            return self->tx_[i];
        }
    }
    throw std::runtime_error("x block cache exhausted");
}

const Eigen::MatrixXd& WhitenedSystem::tq(const Eigen::MatrixXd* bptr) const {
    auto* self = const_cast<WhitenedSystem*>(this);
    for (int i = 0; i < 12; ++i) {
        if (self->srcq_[i] == bptr) return self->tq_[i];
        if (self->srcq_[i] == nullptr) {
            self->srcq_[i] = bptr;
            self->tq_[i] = uq_.transpose() * (*bptr) * uq_;
            return self->tq_[i];
        }
    }
    throw std::runtime_error("xi block cache exhausted");
}

Eigen::MatrixXcd WhitenedSystem::combine(
    const std::vector<std::tuple<Complex, const Eigen::MatrixXd*,
                                 const Eigen::MatrixXd*>>& terms) const {
    const int k = kept();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(k, k);
    for (const auto& [coeff, xb, qb] : terms) {
        const Eigen::MatrixXd& X = tx(xb);
        const Eigen::MatrixXd& Q = tq(qb);
        for (int pj = 0; pj < k; ++pj) {
            const auto [ij, jj] = kept_[pj];
            for (int pk = 0; pk < k; ++pk) {
                const auto [ik, jk] = kept_[pk];
                out(pj, pk) += coeff * X(ik, ij) * Q(jk, jj) /
                               (dkept_(pj) * dkept_(pk));
            }
        }
    }
    return out;
}

Eigen::MatrixXd WhitenedSystem::combine_real(
    const std::vector<std::tuple<double, const Eigen::MatrixXd*,
                                 const Eigen::MatrixXd*>>& terms) const {
    const int k = kept();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, k);
    for (const auto& [coeff, xb, qb] : terms) {
        const Eigen::MatrixXd& X = tx(xb);
        const Eigen::MatrixXd& Q = tq(qb);
        for (int pj = 0; pj < k; ++pj) {
            const auto [ij, jj] = kept_[pj];
            for (int pk = 0; pk < k; ++pk) {
                const auto [ik, jk] = kept_[pk];
                out(pj, pk) += coeff * X(ik, ij) * Q(jk, jj) /
                               (dkept_(pj) * dkept_(pk));
            }
        }
    }
    return out;
}

Eigen::MatrixXcd WhitenedSystem::shifted_hat(const ShiftParams& s) const {
    s.check();
    const Complex lam = s.lambda();
    const Complex g = 1.0 / (1.0 + lam);
    const FormCoeffs c = coeffs_of(mats_->params, mats_->weight);
    const Blocks1D& b = mats_->blk;
    Eigen::MatrixXcd out = ahat_.cast<Complex>();
    if (lam == Complex(0.0, 0.0)) return out;
    out += combine({{0.5 * c.sig * lam, &b.x11, &b.q00x},
                    {-0.5 * c.sig * lam * g, &b.x00, &b.q11x},
                    {0.5 * c.sig * lam, &b.x10, &b.q00x},
                    {-0.5 * c.sig * lam * c.gamma, &b.xs10, &b.q00x},
                    {0.5 * c.sig * lam * g * c.mu, &b.x00, &b.q10x},
                    {-lam * g * (0.5 * c.beta * c.sig - c.kappa * c.theta_sigma),
                     &b.x00, &b.q10}});
    return out;
}

Eigen::VectorXcd WhitenedSystem::reduce(const Eigen::VectorXcd& c) const {
    const int nm = mats_->basis.m_max() + 1;
    const int nn = mats_->basis.n_max() + 1;
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        cm(c.data(), nm, nn);
    const Eigen::MatrixXcd t = ux_.transpose() * cm * uq_;
    Eigen::VectorXcd out(kept());
    for (int p = 0; p < kept(); ++p) {
        const auto [i, j] = kept_[p];
        out(p) = dkept_(p) * t(i, j);
    }
    return out;
}

Eigen::VectorXcd WhitenedSystem::expand(const Eigen::VectorXcd& chat) const {
    return map_ * chat;
}

double WhitenedSystem::v_norm_sq(const Eigen::VectorXcd& chat) const {
    return (chat.adjoint() * shat_ * chat).real()(0) + chat.squaredNorm();
}

nlohmann::json CertReport::to_json() const {
    return {{"name", name},
            {"trials", trials},
            {"worst_slack_rel", worst_slack_rel},
            {"max_ratio", max_ratio},
            {"bound", bound},
            {"empirical_constant", empirical_constant},
            {"pass", pass}};
}

CertReport certify_garding(const OperatorMatrices& mats,
                           const CoercivityConstants& cc, int trials,
                           const std::vector<double>& omegas, unsigned seed) {
    WhitenedSystem ws(mats);
    const double sig = mats.params.sigma;
    const double rho = mats.params.rho;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;

    CertReport rep;
    rep.name = "garding";
    rep.trials = trials;
    rep.worst_slack_rel = std::numeric_limits<double>::infinity();
    rep.empirical_constant = 0.0;

    auto sample = [&](const Eigen::MatrixXcd& ahat, double lower_factor) {
        for (int tcount = 0; tcount < trials; ++tcount) {
            Eigen::VectorXcd c(ws.kept());
            for (int i = 0; i < ws.kept(); ++i) c(i) = Complex(nd(rng), nd(rng));
            c /= c.norm(); // unit H-norm state
            const double two_re = 2.0 * (c.adjoint() * ahat * c).real()(0);
            const double v2 = ws.v_norm_sq(c);
            const double rhs = lower_factor * sig * (1.0 - std::abs(rho)) * v2 -
                               cc.c2_prime;
            rep.worst_slack_rel =
                std::min(rep.worst_slack_rel, (two_re - rhs) / v2);
            rep.empirical_constant = std::max(
                rep.empirical_constant,
                lower_factor * sig * (1.0 - std::abs(rho)) * v2 - two_re);
        }
    };

    sample(ws.Ahat().cast<Complex>(), 1.0);
    for (double om : omegas) {
        ShiftParams s;
        s.omega = om;
        sample(ws.shifted_hat(s), 0.5);
    }
    rep.bound = -1e-6;
    rep.pass = rep.worst_slack_rel >= rep.bound;
    return rep;
}

CertReport certify_bounded(const OperatorMatrices& mats,
                           const CoercivityConstants& cc, int trials,
                           unsigned seed) {
    WhitenedSystem ws(mats);
    const WeightParams& w = mats.weight;
    const double sig = mats.params.sigma;
    const double bm1 = w.beta - 1.0;
    const double sobolev = std::sqrt((2.0 / w.mu) * (2.0 / w.mu) + 2.0 * w.beta / w.mu);
    const double hardy = std::sqrt(8.0 / (bm1 * bm1) + 2.0 * w.mu * w.mu / (bm1 * bm1));
    const double c_explicit =
        0.5 * sig * std::sqrt(6.0) + cc.m1 * std::max({1.0, sobolev, hardy});

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    CertReport rep;
    rep.name = "bounded";
    rep.trials = trials;
    rep.bound = c_explicit;
    rep.max_ratio = 0.0;
    const Eigen::MatrixXd& ahat = ws.Ahat();
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXcd c(ws.kept()), d(ws.kept());
        for (int i = 0; i < ws.kept(); ++i) {
            c(i) = Complex(nd(rng), nd(rng));
            d(i) = Complex(nd(rng), nd(rng));
        }
        const double nu = std::sqrt(ws.v_norm_sq(c));
        const double nw = std::sqrt(ws.v_norm_sq(d));
        if (nu == 0.0 || nw == 0.0) continue;
        const double num = std::abs((d.adjoint() * ahat * c)(0));
        rep.max_ratio = std::max(rep.max_ratio, num / (nu * nw));
    }
    rep.pass = rep.max_ratio <= c_explicit;
    return rep;
}

double boundary_leakage(const TensorBasis& basis, const QuadratureGrid& grid,
                        const WeightParams& w) {
    // largest |e_mn|^2-type boundary term at the truncation edges for the
    // highest-order basis function
    const int m = basis.m_max(), n = basis.n_max();
    const double xmax = grid.x_max();
    const double ximax = grid.xi_max();
    std::vector<double> h, dh, l, dl;
    hermite_all(xmax, m, h, &dh);
    laguerre_all(ximax, n, l, &dl);
    const double edge_x = std::exp(-w.gamma * xmax) * std::abs(h[m]) *
                          (std::abs(dh[m]) + std::abs(h[m]));
    const double edge_xi = std::pow(ximax, w.beta) * std::exp(-w.mu * ximax) *
                           std::abs(l[n]) * (std::abs(dl[n]) + std::abs(l[n]));
    const double xi0 = grid.xi().front() * 1e-4;
    laguerre_all(xi0, n, l, &dl);
    const double edge_0 =
        std::pow(xi0, w.beta) * std::abs(l[n]) * (std::abs(dl[n]) + std::abs(l[n]));
    return std::max({edge_x, edge_xi, edge_0});
}

void save_matrix_csv(const Eigen::MatrixXcd& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "row,col,re,im\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << i << "," << j << "," << m(i, j).real() << ","
                << m(i, j).imag() << "\n";
}

void save_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    save_matrix_csv(Eigen::MatrixXcd(m.cast<Complex>()), path);
}

} // namespace heston
