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

#include "hestonpde/basis.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace heston {

template <typename Scalar>
void hermite_all(Scalar x, int m_max, std::vector<Scalar>& value,
                 std::vector<Scalar>* deriv1, std::vector<Scalar>* deriv2) {
    const int n = m_max + 1;
    value.assign(n, Scalar(0));
    value[0] = Scalar(std::pow(M_PI, -0.25)) * std::exp(-x * x / 2.0);
    if (m_max >= 1) value[1] = std::sqrt(2.0) * x * value[0];
    for (int m = 1; m < m_max; ++m)
        value[m + 1] = std::sqrt(2.0 / (m + 1)) * x * value[m] -
                       std::sqrt(double(m) / (m + 1)) * value[m - 1];
    if (deriv1) {
        deriv1->assign(n, Scalar(0));
        for (int m = 0; m <= m_max; ++m) {
            (*deriv1)[m] = -x * value[m];
            if (m >= 1) (*deriv1)[m] += std::sqrt(2.0 * m) * value[m - 1];
        }
    }
    if (deriv2) {
        // oscillator equation h_m'' = (x^2 - (2m+1)) h_m
        deriv2->assign(n, Scalar(0));
        for (int m = 0; m <= m_max; ++m)
            (*deriv2)[m] = (x * x - Scalar(2.0 * m + 1.0)) * value[m];
    }
}

template <typename Scalar>
void laguerre_all(Scalar xi, int n_max, std::vector<Scalar>& value,
                  std::vector<Scalar>* deriv1, std::vector<Scalar>* deriv2) {
    const int n = n_max + 1;
    std::vector<Scalar> L(n, Scalar(0)), dL(n, Scalar(0)), ddL(n, Scalar(0));
    L[0] = Scalar(1);
    if (n_max >= 1) L[1] = Scalar(1) - xi;
    for (int k = 1; k < n_max; ++k)
        L[k + 1] = ((Scalar(2.0 * k + 1.0) - xi) * L[k] - Scalar(double(k)) * L[k - 1]) /
                   Scalar(double(k + 1));
    for (int k = 1; k <= n_max; ++k) {
        dL[k] = dL[k - 1] - L[k - 1];
        ddL[k] = ddL[k - 1] - dL[k - 1];
    }
    const Scalar e = std::exp(-xi / 2.0);
    value.assign(n, Scalar(0));
    for (int k = 0; k <= n_max; ++k) value[k] = L[k] * e;
    if (deriv1) {
        deriv1->assign(n, Scalar(0));
        for (int k = 0; k <= n_max; ++k) (*deriv1)[k] = (dL[k] - 0.5 * L[k]) * e;
    }
    if (deriv2) {
        deriv2->assign(n, Scalar(0));
        for (int k = 0; k <= n_max; ++k)
            (*deriv2)[k] = (ddL[k] - dL[k] + 0.25 * L[k]) * e;
    }
}

template void hermite_all<double>(double, int, std::vector<double>&,
                                  std::vector<double>*, std::vector<double>*);
template void hermite_all<Complex>(Complex, int, std::vector<Complex>&,
                                   std::vector<Complex>*, std::vector<Complex>*);
template void laguerre_all<double>(double, int, std::vector<double>&,
                                   std::vector<double>*, std::vector<double>*);
template void laguerre_all<Complex>(Complex, int, std::vector<Complex>&,
                                    std::vector<Complex>*, std::vector<Complex>*);

TensorBasis::TensorBasis(int m_max, int n_max) : m_max_(m_max), n_max_(n_max) {
    if (m_max < 0 || n_max < 0)
        throw std::invalid_argument("basis orders must be nonnegative");
}

int TensorBasis::index(int m, int n) const {
    if (m < 0 || m > m_max_ || n < 0 || n > n_max_)
        throw std::out_of_range("basis order out of range");
    return m * (n_max_ + 1) + n;
}

double TensorBasis::eval(int m, int n, double x, double xi) const {
    if (!(xi > 0)) throw std::domain_error("eval: xi must be positive");
    index(m, n);
    std::vector<double> h, l;
    hermite_all(x, m, h);
    laguerre_all(xi, n, l);
    return h[m] * l[n];
}

Complex TensorBasis::eval(int m, int n, Complex z, Complex zeta) const {
    index(m, n);
    std::vector<Complex> h, l;
    hermite_all(z, m, h);
    laguerre_all(zeta, n, l);
    return h[m] * l[n];
}

Eigen::MatrixXd TensorBasis::hermite_matrix(const std::vector<double>& xs,
                                            int deriv) const {
    Eigen::MatrixXd out(xs.size(), m_max_ + 1);
    std::vector<double> v, d1, d2;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        hermite_all(xs[i], m_max_, v, deriv >= 1 ? &d1 : nullptr,
                    deriv >= 2 ? &d2 : nullptr);
        const auto& src = deriv == 0 ? v : (deriv == 1 ? d1 : d2);
        for (int m = 0; m <= m_max_; ++m) out(i, m) = src[m];
    }
    return out;
}

Eigen::MatrixXd TensorBasis::laguerre_matrix(const std::vector<double>& xis,
                                             int deriv) const {
    Eigen::MatrixXd out(xis.size(), n_max_ + 1);
    std::vector<double> v, d1, d2;
    for (std::size_t j = 0; j < xis.size(); ++j) {
        laguerre_all(xis[j], n_max_, v, deriv >= 1 ? &d1 : nullptr,
                     deriv >= 2 ? &d2 : nullptr);
        const auto& src = deriv == 0 ? v : (deriv == 1 ? d1 : d2);
        for (int n = 0; n <= n_max_; ++n) out(j, n) = src[n];
    }
    return out;
}

Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::RowMajor>>
CoefficientVector::as_matrix() const {
    return {c.data(), m_max + 1, n_max + 1};
}

void CoefficientVector::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "index,re,im\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < c.size(); ++i)
        out << i << "," << c(i).real() << "," << c(i).imag() << "\n";
}

CoefficientVector CoefficientVector::load_csv(const std::string& path, int m_max,
                                              int n_max) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CoefficientVector cv(m_max, n_max);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ',');
        const long idx = std::stol(tok);
        std::getline(ss, tok, ',');
        const double re = std::stod(tok);
        std::getline(ss, tok, ',');
        const double im = std::stod(tok);
        if (idx < 0 || idx >= cv.c.size())
            throw std::runtime_error("coefficient index out of range in " + path);
        cv.c(idx) = Complex(re, im);
    }
    return cv;
}

Complex eval_sum(const CoefficientVector& c, const TensorBasis& basis, Complex z,
                 Complex zeta) {
    std::vector<Complex> h, l;
    hermite_all(z, basis.m_max(), h);
    laguerre_all(zeta, basis.n_max(), l);
    Complex acc = 0.0;
    for (int m = 0; m <= basis.m_max(); ++m) {
        Complex row = 0.0;
        for (int n = 0; n <= basis.n_max(); ++n) row += c.at(m, n) * l[n];
        acc += h[m] * row;
    }
    return acc;
}

Complex eval_sum(const CoefficientVector& c, const TensorBasis& basis, double x,
                 double xi) {
    std::vector<double> h, l;
    hermite_all(x, basis.m_max(), h);
    laguerre_all(xi, basis.n_max(), l);
    Complex acc = 0.0;
    for (int m = 0; m <= basis.m_max(); ++m) {
        Complex row = 0.0;
        for (int n = 0; n <= basis.n_max(); ++n) row += c.at(m, n) * l[n];
        acc += h[m] * row;
    }
    return acc;
}

Complex eval_sum_dxi(const CoefficientVector& c, const TensorBasis& basis, double x,
                     double xi) {
    std::vector<double> h, l, dl;
    hermite_all(x, basis.m_max(), h);
    laguerre_all(xi, basis.n_max(), l, &dl);
    Complex acc = 0.0;
    for (int m = 0; m <= basis.m_max(); ++m) {
        Complex row = 0.0;
        for (int n = 0; n <= basis.n_max(); ++n) row += c.at(m, n) * dl[n];
        acc += h[m] * row;
    }
    return acc;
}

ProjectionResult project(const std::function<Complex(double, double)>& u0,
                         const TensorBasis& basis, const QuadratureGrid& grid,
                         const WeightParams& w) {
    const auto& xs = grid.x();
    const auto& xis = grid.xi();
    const int mcols = basis.m_max() + 1, ncols = basis.n_max() + 1;
    if (static_cast<int>(xs.size()) < mcols || static_cast<int>(xis.size()) < ncols)
        throw std::runtime_error(
            "project: quadrature grid under-determines the basis (rank deficient)");

    // Root-weighted evaluation matrices; the normal equations of this least
    // squares problem are exactly the weighted Gram system G c = b.
    Eigen::MatrixXd phix = basis.hermite_matrix(xs, 0);
    Eigen::MatrixXd phiq = basis.laguerre_matrix(xis, 0);
    Eigen::VectorXd rx(xs.size()), rq(xis.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        rx(i) = std::sqrt(grid.wx()[i] * std::exp(-w.gamma * std::abs(xs[i])));
    for (std::size_t j = 0; j < xis.size(); ++j)
        rq(j) = std::sqrt(grid.wxi()[j] * std::pow(xis[j], w.beta - 1.0) *
                          std::exp(-w.mu * xis[j]));
    phix.array().colwise() *= rx.array();
    phiq.array().colwise() *= rq.array();

    Eigen::MatrixXcd y(xs.size(), xis.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < xis.size(); ++j)
            y(i, j) = u0(xs[i], xis[j]) * rx(i) * rq(j);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qrx(phix), qrq(phiq);
    ProjectionResult res;
    res.rank_x = static_cast<int>(qrx.rank());
    res.rank_xi = static_cast<int>(qrq.rank());
    auto cond_of = [](const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr) {
        const auto& R = qr.matrixR();
        const double top = std::abs(R(0, 0));
        double bot = top;
        for (Eigen::Index k = 1; k < std::min(R.rows(), R.cols()); ++k)
            bot = std::min(bot, std::abs(R(k, k)));
        return bot > 0 ? top / bot : std::numeric_limits<double>::infinity();
    };
    res.cond_x = cond_of(qrx);
    res.cond_xi = cond_of(qrq);

    // Min-norm least squares per factor (rank-truncated by the pivoted QR);
    // the decompositions are real, so real and imaginary parts solve apart.
    auto solve_two_sided = [&](const Eigen::MatrixXd& rhs) -> Eigen::MatrixXd {
        const Eigen::MatrixXd z = qrx.solve(rhs);              // (mcols, nq)
        const Eigen::MatrixXd ct = qrq.solve(z.transpose());   // (ncols, mcols)
        return ct.transpose();                                 // (mcols, ncols)
    };
    const Eigen::MatrixXd cre = solve_two_sided(y.real());
    const Eigen::MatrixXd cim = solve_two_sided(y.imag());
    Eigen::MatrixXcd cmat = cre.cast<Complex>() + Complex(0.0, 1.0) * cim;

    res.coeffs = CoefficientVector(basis.m_max(), basis.n_max());
    for (int m = 0; m < mcols; ++m)
        for (int n = 0; n < ncols; ++n)
            res.coeffs.c(m * ncols + n) = cmat(m, n);

    res.input_norm = y.norm();
    res.residual = (y - phix * cmat * phiq.transpose()).norm();
    return res;
}

} // namespace heston
