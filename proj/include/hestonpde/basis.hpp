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

#ifndef HESTONPDE_BASIS_HPP
#define HESTONPDE_BASIS_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hestonpde/quadrature.hpp"

namespace heston {

/// Orthonormal Hermite functions h_m(x) = N_m H_m(x) e^{-x^2/2} with
/// N_m = (sqrt(pi) 2^m m!)^{-1/2}, evaluated for all m = 0..m_max by the
/// normalized three-term recurrence.  Works for complex arguments.
/// out[k * (m_max+1) + m] layout for k-th derivative order when derivs > 0:
/// derivative 1 from the ladder relation, derivative 2 from the ODE.
template <typename Scalar>
void hermite_all(Scalar x, int m_max, std::vector<Scalar>& value,
                 std::vector<Scalar>* deriv1 = nullptr,
                 std::vector<Scalar>* deriv2 = nullptr);

/// Laguerre functions l_n(xi) = L_n(xi) e^{-xi/2}; orthonormal on (0, inf).
/// Derivatives via the exact cumulative recurrences L'_k = L'_{k-1} - L_{k-1},
/// L''_k = L''_{k-1} - L'_{k-1}.
template <typename Scalar>
void laguerre_all(Scalar xi, int n_max, std::vector<Scalar>& value,
                  std::vector<Scalar>* deriv1 = nullptr,
                  std::vector<Scalar>* deriv2 = nullptr);

/// Tensor basis e_mn(x, xi) = h_m(x) l_n(xi), m <= m_max, n <= n_max.
class TensorBasis {
public:
    TensorBasis(int m_max, int n_max);

    int m_max() const { return m_max_; }
    int n_max() const { return n_max_; }
    int size() const { return (m_max_ + 1) * (n_max_ + 1); }
    int index(int m, int n) const;

    double eval(int m, int n, double x, double xi) const;
    Complex eval(int m, int n, Complex z, Complex zeta) const;

    /// Evaluation matrices: rows = points, cols = orders; deriv in {0, 1, 2}.
    Eigen::MatrixXd hermite_matrix(const std::vector<double>& xs, int deriv) const;
    Eigen::MatrixXd laguerre_matrix(const std::vector<double>& xis, int deriv) const;

private:
    int m_max_, n_max_;
};

/// Galerkin state: complex coefficients over the flattened tensor index.
struct CoefficientVector {
    int m_max = 0, n_max = 0;
    Eigen::VectorXcd c;

    CoefficientVector() = default;
    CoefficientVector(int m, int n) : m_max(m), n_max(n) {
        c = Eigen::VectorXcd::Zero((m + 1) * (n + 1));
    }
    int index(int m, int n) const { return m * (n_max + 1) + n; }
    Complex& at(int m, int n) { return c(index(m, n)); }
    Complex at(int m, int n) const { return c(index(m, n)); }
    /// Coefficients as an (m_max+1) x (n_max+1) matrix view.
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
    as_matrix() const;

    void save_csv(const std::string& path) const;
    static CoefficientVector load_csv(const std::string& path, int m_max, int n_max);
};

/// Reconstruction at a (possibly complexified) point.
Complex eval_sum(const CoefficientVector& c, const TensorBasis& basis, Complex z,
                 Complex zeta);
/// Reconstruction and its xi-derivative at a real point.
Complex eval_sum(const CoefficientVector& c, const TensorBasis& basis, double x,
                 double xi);
Complex eval_sum_dxi(const CoefficientVector& c, const TensorBasis& basis, double x,
                     double xi);

struct ProjectionResult {
    CoefficientVector coeffs;
    double residual = 0.0;   ///< || u0 - sum c e ||_H (quadrature norm)
    double input_norm = 0.0; ///< || u0 ||_H
    int rank_x = 0, rank_xi = 0;
    double cond_x = 0.0, cond_xi = 0.0; ///< diag(R) ratio estimates
};

/// Least-squares projection in the H inner product onto span{e_mn}, computed
/// per factor by rank-revealing QR of the root-weighted evaluation matrices.
/// Throws when the quadrature cannot determine the coefficients at all
/// (fewer points than basis functions per direction).
ProjectionResult project(const std::function<Complex(double, double)>& u0,
                         const TensorBasis& basis, const QuadratureGrid& grid,
                         const WeightParams& w);

} // namespace heston

#endif // HESTONPDE_BASIS_HPP
